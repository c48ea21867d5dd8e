"""
Angular densities on (-pi, pi) with a regularly varying profile at 0.

Every model is symmetric, h(theta) = h(-theta). The local behaviour at 0 is
summarized by the index 2*delta (h(ts)/h(t) -> s^{2 delta} as t -> 0) and the
limit profile psi, which is (2s)^delta for regularly varying densities.

Sampling inverts a tabulated CDF. The table is built once per model from
adaptive quadrature on a nonuniform grid that is geometrically refined at
0, +-pi/2 and +-pi, where the shipped densities may be singular.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, NamedTuple, Optional, Tuple

import numpy as np
from scipy.interpolate import PchipInterpolator

from ._quad import piecewise_quad

PI = math.pi
HALF_GRID = 2048
_CENTRES = (0.0, PI / 2, PI)


class PsiGrowth(NamedTuple):
    """Constants (K, lambda1, lambda2) with psi(z) <= K max(z^lambda1, z^lambda2)."""

    K: float
    lambda1: float
    lambda2: float


@dataclass(frozen=True)
class AngularSecondOrder:
    a: Callable[[float], float]
    b: Callable[[float], float]


def power_psi(delta: float) -> Callable[[float], float]:
    def psi(s):
        return np.power(2.0 * np.asarray(s, dtype=float), delta)

    return psi


def _half_grid(cutoff: float, n: int = HALF_GRID) -> np.ndarray:
    """Nonuniform grid on [0, cutoff], geometrically refined near 0, pi/2 and pi."""
    geo = np.geomspace(1e-12, 0.2, n // 4)
    pieces = [np.zeros(1), geo, np.linspace(0.0, cutoff, n // 4)]
    for centre in (PI / 2, PI):
        offsets = np.geomspace(1e-10, 0.2, n // 8)
        pieces += [centre - offsets, centre + offsets]
    grid = np.unique(np.concatenate(pieces))
    grid = grid[(grid >= 0.0) & (grid < cutoff)]
    return np.append(grid, cutoff)


class AngularModel:
    """Symmetric angular density with local index 2*delta at 0.

    Subclasses implement ``_density`` (vectorized, |theta| <= pi) and set
    ``delta``. The normalization constant, the CDF table and the sampler are
    shared.
    """

    delta: float = 0.0
    second_order: Optional[AngularSecondOrder] = None

    # -- density -----------------------------------------------------------
    def _density(self, theta):
        raise NotImplementedError

    def density(self, theta):
        th = np.asarray(theta, dtype=float)
        if np.any(~(np.abs(th) <= PI)):
            raise ValueError("angle must lie in (-pi, pi)")
        with np.errstate(divide="ignore", invalid="ignore"):
            out = self._density(th)
        return float(out) if out.ndim == 0 else out

    @property
    def support_half_width(self) -> float:
        return PI

    @property
    def breakpoints(self) -> Tuple[float, ...]:
        """Angles in [-pi, pi] where the density may be singular or discontinuous."""
        eps = self.support_half_width
        pts = {0.0, PI / 2, -PI / 2, eps, -eps}
        return tuple(sorted(p for p in pts if abs(p) <= PI))

    # -- local structure at 0 ----------------------------------------------
    @property
    def local_index(self) -> float:
        return 2.0 * self.delta

    def psi(self, s):
        return power_psi(self.delta)(s)

    def local_profile(self):
        """(delta, psi) describing h near 0."""
        return self.delta, self.psi

    @property
    def psi_growth(self) -> PsiGrowth:
        return PsiGrowth(K=2.0**self.delta, lambda1=self.delta, lambda2=self.delta)

    # -- mass, CDF, sampling -------------------------------------------------
    def _offset_density(self, centre, side, v):
        """h(centre + side*v); families with singularities at pi/2 or pi override this
        so that small offsets v are resolved exactly rather than through cos/sin of
        an angle rounded near the singular point."""
        return self._density(centre + side * v)

    def _half_mass(self, lo, hi):
        # integrate each piece in the offset from its nearest singular centre
        cuts = sorted({lo, hi, *(p for p in (*_CENTRES, *self.breakpoints) if lo < p < hi)})
        total = 0.0
        for p, q in zip(cuts[:-1], cuts[1:]):
            mid = 0.5 * (p + q)
            centre = min(_CENTRES, key=lambda c: abs(mid - c))
            side = 1.0 if mid >= centre else -1.0
            v1, v2 = sorted((abs(p - centre), abs(q - centre)))

            def f(v, centre=centre, side=side):
                with np.errstate(divide="ignore", invalid="ignore"):
                    return float(self._offset_density(centre, side, np.asarray(v, dtype=float)))

            value, _ = piecewise_quad(f, v1, v2, epsabs=1e-16, epsrel=1e-12)
            total += value
        return total

    def total_mass(self) -> float:
        """Integral of the density over (-pi, pi) by adaptive quadrature."""
        return 2.0 * self._half_mass(0.0, self.support_half_width)

    @cached_property
    def _table(self):
        # G(s) = P(0 < Theta <= s) on the half grid, cellwise quadrature then cumulated
        grid = _half_grid(self.support_half_width)
        cells = np.array([self._half_mass(lo, hi) for lo, hi in zip(grid[:-1], grid[1:])])
        mass = np.concatenate([[0.0], np.cumsum(cells)])
        mass *= 0.5 / mass[-1]
        keep = np.concatenate([[True], np.diff(mass) > 0])
        forward = PchipInterpolator(grid, mass, extrapolate=False)
        inverse = PchipInterpolator(mass[keep], grid[keep], extrapolate=False)
        return grid, mass, forward, inverse

    def cdf(self, theta):
        """P(Theta <= theta) from the tabulated, monotone-cubic interpolated CDF."""
        th = np.asarray(theta, dtype=float)
        grid, mass, forward, _ = self._table
        s = np.minimum(np.abs(th), grid[-1])
        half = np.nan_to_num(forward(s), nan=0.5)
        out = np.clip(0.5 + np.sign(th) * half, 0.0, 1.0)
        return float(out) if out.ndim == 0 else out

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        if int(n) != n or n < 1:
            raise ValueError("sample size must be a positive integer")
        _, mass, _, inverse = self._table
        w = rng.random(int(n)) - 0.5
        s = inverse(np.minimum(np.abs(w), mass[-1]))
        return np.where(w >= 0, s, -s)

    # -- diagnostics ---------------------------------------------------------
    def rv_ratio(self, t: float, s: float) -> float:
        """h(t s) / h(t); tends to s^{2 delta} as t -> 0."""
        return self.density(t * s) / self.density(t)

    def psi_ratio(self, t: float, z: float) -> float:
        """h(sqrt(2z/t)) / h(1/sqrt(t)); tends to psi(z) as t -> infinity."""
        return self.density(math.sqrt(2.0 * z / t)) / self.density(1.0 / math.sqrt(t))

    def descriptor(self) -> dict:
        return {"family": "custom"}


@dataclass(frozen=True, eq=False)
class UniformAngular(AngularModel):
    """Uniform angle on (-pi, pi): the spherical (elliptical) case."""

    delta = 0.0

    def _density(self, theta):
        return np.full(np.shape(theta), 1.0 / (2.0 * PI))

    @property
    def breakpoints(self):
        return (0.0,)

    def psi(self, s):
        return np.ones_like(np.asarray(s, dtype=float))

    @property
    def second_order(self):
        # h(.)/h(1/sqrt t) == 1 == psi exactly
        return AngularSecondOrder(a=lambda t: 0.0, b=lambda z: 0.0)

    def cdf(self, theta):
        th = np.asarray(theta, dtype=float)
        out = np.clip((th + PI) / (2.0 * PI), 0.0, 1.0)
        return float(out) if out.ndim == 0 else out

    def descriptor(self):
        return {"family": "uniform"}

    def __eq__(self, other):
        return isinstance(other, UniformAngular)

    def __hash__(self):
        return hash("uniform")


@dataclass(frozen=True, eq=False)
class DirichletAngular(AngularModel):
    """c |sin theta|^{2a-1} |cos theta|^{2b-1} on (-eps, eps), zero outside.

    With eps = pi this is the generalised symmetrised Dirichlet angle and
    c = Gamma(a+b) / (2 Gamma(a) Gamma(b)); for eps < pi the constant comes
    from quadrature.
    """

    a: float = 0.5
    b: float = 0.5
    eps: float = PI

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise ValueError("Dirichlet parameters a, b must be positive")
        if not (0 < self.eps <= PI):
            raise ValueError("cutoff eps must lie in (0, pi]")

    @property
    def delta(self):
        return self.a - 0.5

    @property
    def support_half_width(self):
        return self.eps

    @cached_property
    def c_ab(self) -> float:
        if self.eps == PI:
            return math.exp(math.lgamma(self.a + self.b) - math.lgamma(self.a) - math.lgamma(self.b)) / 2.0
        unit = _UnnormalizedDirichlet(self.a, self.b, self.eps)
        return 1.0 / unit.total_mass()

    def _density(self, theta):
        return self.c_ab * _dirichlet_kernel(theta, self.a, self.b, self.eps)

    def _offset_density(self, centre, side, v):
        return self.c_ab * _dirichlet_offset_kernel(centre, side, v, self.a, self.b, self.eps)

    def descriptor(self):
        return {"family": "dirichlet", "a": self.a, "b": self.b, "eps": self.eps}

    def __eq__(self, other):
        return isinstance(other, DirichletAngular) and (self.a, self.b, self.eps) == (other.a, other.b, other.eps)

    def __hash__(self):
        return hash(("dirichlet", self.a, self.b, self.eps))


def _dirichlet_kernel(theta, a, b, eps):
    inside = np.abs(theta) < eps
    val = np.power(np.abs(np.sin(theta)), 2 * a - 1) * np.power(np.abs(np.cos(theta)), 2 * b - 1)
    return np.where(inside, val, 0.0)


def _dirichlet_offset_kernel(centre, side, v, a, b, eps):
    # |sin|, |cos| at centre + side*v written in terms of v: exact for small v
    if centre == PI / 2:
        s_abs, c_abs = np.cos(v), np.sin(v)
    else:
        s_abs, c_abs = np.sin(v), np.cos(v)
    inside = np.abs(centre + side * v) < eps
    return np.where(inside, np.power(s_abs, 2 * a - 1) * np.power(c_abs, 2 * b - 1), 0.0)


class _UnnormalizedDirichlet(AngularModel):
    def __init__(self, a, b, eps):
        self.a, self.b, self.eps = a, b, eps

    @property
    def support_half_width(self):
        return self.eps

    def _density(self, theta):
        return _dirichlet_kernel(theta, self.a, self.b, self.eps)

    def _offset_density(self, centre, side, v):
        return _dirichlet_offset_kernel(centre, side, v, self.a, self.b, self.eps)


class CustomAngular(AngularModel):
    """Angular law from a user density (vectorized callable, symmetric, normalized).

    ``delta`` and ``psi`` describe the local behaviour at 0 and are taken on
    trust; ``rv_ratio`` and ``psi_ratio`` report how well the density
    matches them.
    """

    def __init__(self, density_fn, delta=0.0, psi=None, breakpoints=(), name="custom", second_order=None):
        if not delta > -0.5:
            raise ValueError("local index 2*delta must exceed -1")
        self._fn = density_fn
        self.delta = float(delta)
        self._psi = psi
        self._extra = tuple(breakpoints)
        self.name = name
        self.second_order = second_order

    def _density(self, theta):
        return np.asarray(self._fn(theta), dtype=float)

    @property
    def breakpoints(self):
        return tuple(sorted(set(super().breakpoints) | set(self._extra)))

    def psi(self, s):
        if self._psi is None:
            return super().psi(s)
        return self._psi(s)

    def descriptor(self):
        return {"family": "custom", "name": self.name, "delta": self.delta}


def psi_consistency_gap(model: AngularModel, t: float, z_grid) -> float:
    """max_z |h(sqrt(2z/t))/h(1/sqrt t) - psi(z)| over a z-grid."""
    return max(abs(model.psi_ratio(t, z) - float(model.psi(z))) for z in z_grid)


def angular_second_order_violation(model: AngularModel, t_grid, z_grid) -> float:
    """Largest excess of |h(sqrt(2z/t))/h(1/sqrt t) - psi(z)| over a(t) b(z) (<= 0 means it holds)."""
    so = model.second_order
    if so is None:
        raise ValueError("model has no second-order pair")
    worst = -math.inf
    for t in t_grid:
        for z in z_grid:
            gap = abs(model.psi_ratio(t, z) - float(model.psi(z)))
            worst = max(worst, gap - so.a(t) * so.b(z))
    return worst
