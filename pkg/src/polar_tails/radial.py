"""
Radial laws in the Gumbel max-domain of attraction.

A radial model carries the survivor function ``1 - F``, its scaling
function ``w`` and a quantile for inverse-transform sampling. The shipped
family is the exponential-power (Kotz) tail ``K u^N exp(-r u^kappa)``; the
chi-with-2-df radius (``R^2 ~ chi^2_2``) is the Kotz member
``K=1, N=0, r=1/2, kappa=2``.

Everything is evaluated through ``log_survivor`` so that ratios such as
``(1 - F(u + x/w(u))) / (1 - F(u))`` stay finite far past double-precision
underflow of the survivor itself.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional

import numpy as np
from scipy import optimize


class FamilyTag(str, enum.Enum):
    KOTZ = "kotz"
    CHI2DF = "chi2"
    CUSTOM = "custom"


@dataclass(frozen=True)
class SecondOrderBound:
    """Pair (A, B) with |S(u + x/w(u))/S(u) - e^{-x}| <= A(u) B(x) for u >= u_min, x >= 0."""

    A: Callable[[float], float]
    B: Callable[[float], float]
    u_min: float


def _as_float_or_array(value):
    return float(value) if np.ndim(value) == 0 else value


class RadialModel:
    """Interface shared by all radial laws. Subclasses provide log_survivor and scaling_w."""

    family_tag: FamilyTag = FamilyTag.CUSTOM
    upper_endpoint = math.inf

    def log_survivor(self, u):
        raise NotImplementedError

    def scaling_w(self, u):
        raise NotImplementedError

    def survivor(self, u):
        return _as_float_or_array(np.exp(self.log_survivor(u)))

    def t(self, u):
        """u * w(u), the quantity that drives every approximation."""
        return _as_float_or_array(np.asarray(u, dtype=float) * self.scaling_w(u))

    @property
    def second_order(self) -> Optional[SecondOrderBound]:
        return None

    def quantile(self, p):
        p_arr = np.asarray(p, dtype=float)
        if np.any(~((p_arr > 0.0) & (p_arr < 1.0))):
            raise ValueError("quantile requires p in (0, 1)")
        return _as_float_or_array(np.reshape(self._quantile(p_arr), p_arr.shape))

    def _quantile(self, p):
        raise NotImplementedError

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        # 1 - U lies in (0, 1]; p = 1 maps to the lower end of the support
        return np.asarray(self._quantile(1.0 - rng.random(n)), dtype=float)

    def descriptor(self) -> dict:
        return {"family": self.family_tag.value}


def _check_positive_radius(u):
    u_arr = np.asarray(u, dtype=float)
    if np.any(~(u_arr > 0.0)):
        raise ValueError("scaling function requires u > 0")
    return u_arr


# sup_{x>=0} x^2 e^{-x/2} / (1+x) is attained at x = (1 + sqrt 17)/2,
# sup_{x>=0} x^2 e^{-x/4} / (1+x) at x = (3 + sqrt 41)/2 (set the log-derivative to 0).
def _sup_ratio(decay, xstar):
    return xstar**2 * math.exp(-decay * xstar) / (1.0 + xstar)


_M_HALF = _sup_ratio(0.5, (1.0 + math.sqrt(17.0)) / 2.0)
_M_QUARTER = _sup_ratio(0.25, (3.0 + math.sqrt(41.0)) / 2.0)


@dataclass(frozen=True)
class KotzRadial(RadialModel):
    """Survivor ``min(1, K u^N exp(-r u^kappa))`` completed below the threshold ``u0``.

    ``u0`` is the largest root of ``K u^N exp(-r u^kappa) = 1``. When the
    tail function never reaches 1 (N > 0 with a small K) the survivor is set
    to 1 up to the mode of the tail function, which leaves an atom there of
    mass ``1 - K u0^N exp(-r u0^kappa)``; an atom at zero is rejected since
    the radius must be positive.
    """

    K: float = 1.0
    N: float = 0.0
    r: float = 1.0
    kappa: float = 1.0
    family_tag: FamilyTag = field(default=FamilyTag.KOTZ, compare=False)

    def __post_init__(self):
        if not (self.K > 0 and self.r > 0 and self.kappa > 0):
            raise ValueError("Kotz parameters need K, r, kappa > 0")
        if not math.isfinite(self.N):
            raise ValueError("Kotz power N must be finite")
        if self.N == 0 and self.K < 1:
            raise ValueError("K < 1 with N = 0 puts an atom at 0; the radius must be positive")
        # force evaluation so invalid parameter sets fail at construction
        _ = self.u0

    @classmethod
    def chi2df(cls) -> "KotzRadial":
        return cls(K=1.0, N=0.0, r=0.5, kappa=2.0, family_tag=FamilyTag.CHI2DF)

    def _log_tail(self, u):
        # u^kappa may overflow to inf; the log-survivor is then -inf, which is correct
        with np.errstate(over="ignore"):
            return math.log(self.K) + self.N * np.log(u) - self.r * np.power(u, self.kappa)

    @cached_property
    def mode(self) -> float:
        if self.N <= 0:
            return 0.0
        return (self.N / (self.r * self.kappa)) ** (1.0 / self.kappa)

    @cached_property
    def u0(self) -> float:
        if self.N == 0 or self.mode == 0.0:
            # a mode that underflows to 0 means the power factor is numerically 1
            return (max(math.log(self.K), 0.0) / self.r) ** (1.0 / self.kappa)
        if self.N > 0 and self._log_tail(self.mode) <= 0.0:
            return self.mode
        lo = self.mode if self.N > 0 else 0.0
        hi = max(lo, 1.0)
        while self._log_tail(hi) > 0.0:
            hi *= 2.0
        if lo == 0.0:
            lo = hi / 2.0
            while self._log_tail(lo) < 0.0:
                lo /= 2.0
        return optimize.brentq(self._log_tail, lo, hi, xtol=1e-15, rtol=1e-15)

    @cached_property
    def atom(self) -> float:
        """Mass of the atom at u0 (zero unless the tail function stays below 1)."""
        if self.u0 == 0.0:
            return 0.0
        return max(0.0, 1.0 - math.exp(self._log_tail(self.u0)))

    def log_survivor(self, u):
        u_arr = np.asarray(u, dtype=float)
        if np.any(u_arr < 0):
            raise ValueError("survivor requires u >= 0")
        above = u_arr > self.u0
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(above, self._log_tail(np.where(above, u_arr, 1.0)), 0.0)
        return _as_float_or_array(out)

    def scaling_w(self, u):
        u_arr = _check_positive_radius(u)
        return _as_float_or_array(self.r * self.kappa * np.power(u_arr, self.kappa - 1.0))

    def _quantile(self, p):
        # Safeguarded Newton on log K + N log u - r u^kappa = log p over (u0, inf);
        # strictly decreasing there, so the bracket [lo, hi] always holds the root.
        p = np.atleast_1d(np.asarray(p, dtype=float))
        logp = np.log(p)
        out = np.full(p.shape, self.u0)
        top = self._log_tail(self.u0) if self.u0 > 0 else 0.0
        active = logp < top
        if not np.any(active):
            return out
        target = logp[active]
        guess = np.power(np.maximum((math.log(self.K) - target) / self.r, 0.0), 1.0 / self.kappa)
        lo = np.full(target.shape, self.u0)
        hi = np.maximum(guess, max(self.u0, 1e-300)) * 2.0 + 1.0
        while True:
            bad = self._log_tail(hi) > target
            if not np.any(bad):
                break
            hi = np.where(bad, hi * 2.0, hi)
        u = np.clip(guess, lo, hi)
        u = np.where(u <= lo, 0.5 * (lo + hi), u)
        for _ in range(200):
            phi = self._log_tail(u) - target
            lo = np.where(phi > 0, u, lo)
            hi = np.where(phi < 0, u, hi)
            slope = self.N / u - self.r * self.kappa * np.power(u, self.kappa - 1.0)
            with np.errstate(divide="ignore", invalid="ignore"):
                step = u - phi / slope
            bisect = 0.5 * (lo + hi)
            u_new = np.where((step > lo) & (step < hi) & np.isfinite(step), step, bisect)
            done = (np.abs(phi) <= 1e-14 * np.maximum(1.0, np.abs(target))) | (hi - lo <= 4e-16 * hi)
            u = np.where(done, u, u_new)
            if np.all(done):
                break
        out[active] = u
        return out

    @property
    def second_order(self) -> Optional[SecondOrderBound]:
        # Above u0 with N = 0 the ratio is exp(-(t/kappa)[(1 + x/t)^kappa - 1]).
        # Writing it as e^{-x} e^{-D}, Taylor's remainder gives
        #   0 <= D <= (kappa-1) x^2 / (2t) * (1 + x/t)^{max(kappa-2, 0)}   (kappa >= 1),
        # and |ratio - e^{-x}| <= e^{-x} D. For kappa <= 2 this is at most
        #   (kappa-1) M_half / (2t) * (1+x) e^{-x/2},
        # and for kappa > 2 with t >= 4(kappa-2), (1+x/t)^{kappa-2} <= e^{x/4}, giving
        #   (kappa-1) M_quarter / (2t) * (1+x) e^{-x/2}.
        # N != 0 or kappa < 1 ship no analytic pair.
        if self.N != 0 or self.kappa < 1:
            return None
        if self.kappa <= 2:
            const = (self.kappa - 1.0) * _M_HALF / 2.0
            t_min = 1.0
        else:
            const = (self.kappa - 1.0) * _M_QUARTER / 2.0
            t_min = max(1.0, 4.0 * (self.kappa - 2.0))
        u_min = max(self.u0, (t_min / (self.r * self.kappa)) ** (1.0 / self.kappa))
        model = self

        def A(u):
            return const / model.t(u)

        def B(x):
            return (1.0 + x) * math.exp(-x / 2.0)

        return SecondOrderBound(A=A, B=B, u_min=u_min)

    def descriptor(self) -> dict:
        return {"family": self.family_tag.value, "K": self.K, "N": self.N, "r": self.r, "kappa": self.kappa}


@dataclass(frozen=True)
class CustomRadial(RadialModel):
    """Radial law from user callables; quantiles by bracketing root search.

    ``survivor`` must be continuous and strictly decreasing where it is below 1.
    """

    survivor_fn: Callable[[float], float]
    scaling_fn: Callable[[float], float]
    log_survivor_fn: Optional[Callable[[float], float]] = None
    name: str = "custom"
    family_tag: FamilyTag = field(default=FamilyTag.CUSTOM, compare=False)

    def log_survivor(self, u):
        u_arr = np.asarray(u, dtype=float)
        if np.any(u_arr < 0):
            raise ValueError("survivor requires u >= 0")
        if self.log_survivor_fn is not None:
            out = np.vectorize(self.log_survivor_fn, otypes=[float])(u_arr)
        else:
            with np.errstate(divide="ignore"):
                out = np.log(np.vectorize(self.survivor_fn, otypes=[float])(u_arr))
        return _as_float_or_array(out)

    def scaling_w(self, u):
        u_arr = _check_positive_radius(u)
        return _as_float_or_array(np.vectorize(self.scaling_fn, otypes=[float])(u_arr))

    def _quantile_one(self, p):
        logp = math.log(p)
        lo, hi = 0.0, 1.0
        while self.log_survivor(hi) > logp:
            lo, hi = hi, hi * 2.0
        if self.log_survivor(lo) <= logp:
            return lo
        return optimize.brentq(lambda v: self.log_survivor(v) - logp, lo, hi, xtol=1e-15, rtol=1e-14)

    def _quantile(self, p):
        return np.vectorize(self._quantile_one, otypes=[float])(p)

    def descriptor(self) -> dict:
        return {"family": self.family_tag.value, "name": self.name}


def mda_ratio_diagnostic(model: RadialModel, u: float, x: float) -> float:
    """(1 - F(u + x/w(u))) / (1 - F(u)); tends to e^{-x} in the Gumbel domain."""
    shifted = u + x / model.scaling_w(u)
    if shifted < 0:
        raise ValueError("u + x/w(u) must be nonnegative")
    return math.exp(model.log_survivor(shifted) - model.log_survivor(u))


def self_neglecting_ratio(model: RadialModel, u: float, z: float) -> float:
    """w(u + z/w(u)) / w(u); tends to 1 locally uniformly in z."""
    w_u = model.scaling_w(u)
    return model.scaling_w(u + z / w_u) / w_u


def second_order_violation(model: RadialModel, u_grid, x_grid) -> float:
    """Largest excess of |ratio - e^{-x}| over A(u)B(x) on a grid (<= 0 means the bound holds).

    Grid points with u below the bound's validity threshold are skipped.
    """
    bound = model.second_order
    if bound is None:
        raise ValueError("model has no second-order pair")
    worst = -math.inf
    for u in u_grid:
        if u < bound.u_min:
            continue
        for x in x_grid:
            gap = abs(mda_ratio_diagnostic(model, u, x) - math.exp(-x))
            worst = max(worst, gap - bound.A(u) * bound.B(x))
    return worst
