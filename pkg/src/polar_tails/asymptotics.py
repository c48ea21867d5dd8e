"""Closed-form limit objects and tail expansions for polar vectors.

The conditional limit law is the symmetric law with density proportional to
exp(-z^2/2) psi(z^2/2). For the power profile psi(s) = (2s)^delta its square
is Gamma(delta + 1/2, rate 1/2), which gives a closed-form CDF through the
regularized incomplete gamma function.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import polar_exact
from ._quad import piecewise_quad
from .polar_exact import PolarModel
from .special import gammainc_p, gammainc_q


# -- limit law ----------------------------------------------------------------------


@dataclass(frozen=True)
class LimitLaw:
    """Symmetric law with density exp(-z^2/2) psi(z^2/2) / normalizer."""

    psi: Callable[[float], float]
    delta: Optional[float] = None  # set when psi(s) = (2s)^delta, enables the closed form
    normalizer: float = field(default=float("nan"))

    @classmethod
    def power(cls, delta: float) -> "LimitLaw":
        if not delta > -0.5:
            raise ValueError("power profile needs delta > -1/2")

        def psi(s, d=delta):
            return (2.0 * s) ** d if s > 0 else (1.0 if d == 0 else (0.0 if d > 0 else math.inf))

        norm = 2.0 ** (delta + 0.5) * math.gamma(delta + 0.5)
        return cls(psi=psi, delta=float(delta), normalizer=norm)

    @classmethod
    def from_psi(cls, psi: Callable[[float], float]) -> "LimitLaw":
        value, _ = piecewise_quad(lambda s: math.exp(-s * s / 2) * psi(s * s / 2), 0.0, math.inf, epsrel=1e-12)
        return cls(psi=psi, delta=None, normalizer=2.0 * value)

    @classmethod
    def gaussian(cls) -> "LimitLaw":
        return cls.power(0.0)

    @property
    def has_closed_form(self) -> bool:
        return self.delta is not None

    def density(self, z: float) -> float:
        z = float(z)
        if math.isinf(z):
            return 0.0
        return math.exp(-z * z / 2) * self.psi(z * z / 2) / self.normalizer

    def closed_form_cdf(self, z: float) -> float:
        if self.delta is None:
            raise ValueError("closed form only exists for the power profile")
        z = float(z)
        if math.isinf(z):
            return 1.0 if z > 0 else 0.0
        a = self.delta + 0.5
        x = z * z / 2
        if z >= 0:
            return 0.5 + 0.5 * gammainc_p(a, x)
        # lower tail by the upper incomplete gamma: no cancellation
        return 0.5 * gammainc_q(a, x)

    def numeric_cdf(self, z: float) -> float:
        """CDF by direct quadrature of the density."""
        z = float(z)
        if math.isinf(z):
            return 1.0 if z > 0 else 0.0

        def f(s):
            return math.exp(-s * s / 2) * self.psi(s * s / 2)

        tail, _ = piecewise_quad(f, abs(z), math.inf, epsabs=1e-15, epsrel=1e-12)
        tail /= self.normalizer
        return 1.0 - tail if z >= 0 else tail

    def cdf(self, z: float) -> float:
        return self.closed_form_cdf(z) if self.delta is not None else self.numeric_cdf(z)

    def sf(self, z: float) -> float:
        return self.cdf(-z)


def limit_cdf(law: LimitLaw, z: float) -> float:
    return law.cdf(z)


def exp_law_cdf(x: float) -> float:
    """Unit exponential CDF, the limit of the rescaled X-exceedance."""
    return -math.expm1(-x) if x > 0 else 0.0


# -- marginal tail approximations ----------------------------------------------------


@dataclass(frozen=True)
class ApproxContext:
    u: float
    t: float
    h_at: float  # angular density at 1/sqrt(t)
    rho: float = 0.0
    law: LimitLaw = field(default_factory=LimitLaw.gaussian)

    def __post_init__(self):
        if not (self.t > 0 and self.h_at > 0):
            raise ValueError("approximation context needs t > 0 and h(1/sqrt(t)) > 0")

    @classmethod
    def from_model(cls, model: PolarModel, u: float, law: Optional[LimitLaw] = None) -> "ApproxContext":
        t = float(model.radial.t(u))
        if law is None:
            law = LimitLaw.power(model.angular.delta)
        return cls(u=u, t=t, h_at=float(model.angular.density(1.0 / math.sqrt(t))), rho=model.rho, law=law)


def thm1_survivor_approx(ctx: ApproxContext, radial_survivor_at_u: float) -> float:
    """t^{-1/2} h(1/sqrt t) S(u) times the limit-law normalizer."""
    return ctx.h_at * radial_survivor_at_u * ctx.law.normalizer / math.sqrt(ctx.t)


def power_constant(delta: float, strict: bool = False) -> float:
    """Integral of exp(-x^2/2)|x|^{2 delta}; ``strict`` gives the divided-Gamma variant."""
    g = math.gamma(delta + 0.5)
    return 2.0 ** (delta + 0.5) / g if strict else 2.0 ** (delta + 0.5) * g


def thm3_survivor_approx(ctx: ApproxContext, radial_survivor_at_u: float, delta: Optional[float] = None,
                         strict: bool = False) -> float:
    if delta is None:
        if ctx.law.delta is None:
            raise ValueError("regularly varying approximation needs delta")
        delta = ctx.law.delta
    return power_constant(delta, strict) * ctx.h_at * radial_survivor_at_u / math.sqrt(ctx.t)


def thm1_log_survivor_approx(model: PolarModel, u: float, law: Optional[LimitLaw] = None) -> float:
    """log of the marginal approximation, usable where S(u) underflows."""
    ctx = ApproxContext.from_model(model, u, law)
    return math.log(ctx.h_at * ctx.law.normalizer / math.sqrt(ctx.t)) + float(model.radial.log_survivor(u))


def thm3_log_survivor_approx(model: PolarModel, u: float, strict: bool = False) -> float:
    ctx = ApproxContext.from_model(model, u)
    delta = model.angular.delta
    return math.log(power_constant(delta, strict) * ctx.h_at / math.sqrt(ctx.t)) + float(model.radial.log_survivor(u))


# -- conditional limits -------------------------------------------------------------


def thm2_joint_limit(x: float, y: float, rho: float, law: LimitLaw) -> float:
    """Limit of P(Y <= rho u + y u/sqrt(t), X <= u + x/w(u) | X > u)."""
    if not x > 0:
        raise ValueError("x must be positive")
    if not -1 < rho < 1:
        raise ValueError("rho must lie in (-1, 1)")
    return law.cdf(y / math.sqrt(1 - rho * rho)) * exp_law_cdf(x)


def thm4_second_order(z: float, rho: float, t: float, law: LimitLaw) -> float:
    """Second-order expansion of P(Y > rho u + z u sqrt(1-rho^2)/sqrt(t) | X > u), clipped to [0, 1]."""
    if not 0 <= rho < 1:
        raise ValueError("second-order expansion needs rho in [0, 1)")
    if not t > 0:
        raise ValueError("t must be positive")
    val = law.sf(z) + rho / math.sqrt(1 - rho * rho) / math.sqrt(t) * law.density(z)
    return min(1.0, max(0.0, val))


def standardized_z(u: float, y: float, rho: float, t: float) -> float:
    """z with y = rho u + z u sqrt(1 - rho^2) / sqrt(t)."""
    return (y - rho * u) * math.sqrt(t) / (u * math.sqrt(1 - rho * rho))


# -- joint tails --------------------------------------------------------------------


class TailRegime(str, enum.Enum):
    EQUIVALENT = "equivalent"
    DEGENERATE_LIMIT = "degenerate-limit"
    NEGLIGIBLE = "negligible"


def classify_level(rho: float, c: float) -> TailRegime:
    """Behaviour of P(X > u, Y > c u) relative to P(X > u)."""
    if c > 1:
        raise ValueError("level c must be at most 1")
    if c < rho:
        return TailRegime.EQUIVALENT
    if c == rho:
        return TailRegime.DEGENERATE_LIMIT
    return TailRegime.NEGLIGIBLE


def joint_tail_asym(x: float, y: float, u: float, model: PolarModel, law: Optional[LimitLaw] = None) -> float:
    """Approximation of P(X > u + x/w(u), Y > rho u + y sqrt(u/w(u)))."""
    if law is None:
        law = LimitLaw.power(model.angular.delta)
    rho = model.rho
    y_part = law.sf(y / math.sqrt(1 - rho * rho)) if math.isfinite(y) else (1.0 if y < 0 else 0.0)
    return math.exp(-x) * y_part * polar_exact.survivor_x(model, u)


def joint_tail_thresholds(x: float, y: float, u: float, model: PolarModel):
    w = float(model.radial.scaling_w(u))
    return u + x / w, model.rho * u + y * math.sqrt(u / w)


@dataclass(frozen=True)
class EllipticalConstants:
    alpha_printed: float  # nan when the printed radicand is negative
    alpha_corrected: float
    K: float


def elliptical_ext_constants(rho: float, c: float) -> EllipticalConstants:
    if not -1 < rho < 1:
        raise ValueError("rho must lie in (-1, 1)")
    if not rho < c <= 1:
        raise ValueError("level c must satisfy rho < c <= 1")
    d = 1 - rho * rho
    printed = (1 - 2 * c * rho + rho * rho) / d
    corrected = (1 - 2 * c * rho + c * c) / d
    K = d**1.5 / ((1 - c * rho) * (c - rho))
    return EllipticalConstants(math.sqrt(printed) if printed >= 0 else math.nan, math.sqrt(corrected), K)


def elliptical_joint_tail(radial, u: float, alpha: float, K: float) -> float:
    """alpha K/(2 pi) S(alpha u) / (u w(alpha u))."""
    return alpha * K / (2 * math.pi) * float(radial.survivor(alpha * u)) / (u * float(radial.scaling_w(alpha * u)))


@dataclass(frozen=True)
class EllipticalAdjudication:
    reference: float
    printed: float
    corrected: float
    ratio_printed: float
    ratio_corrected: float
    selected: str


def adjudicate_elliptical(model: PolarModel, u: float, c: float, reference: Optional[float] = None) -> EllipticalAdjudication:
    """Compare both alpha candidates against the exact P(X > u, Y > c u)."""
    consts = elliptical_ext_constants(model.rho, c)
    if reference is None:
        reference = polar_exact.joint_survivor(model, u, c * u)
    corrected = elliptical_joint_tail(model.radial, u, consts.alpha_corrected, consts.K)
    printed = (elliptical_joint_tail(model.radial, u, consts.alpha_printed, consts.K)
               if math.isfinite(consts.alpha_printed) and consts.alpha_printed > 0 else math.nan)
    r_c = reference / corrected
    r_p = reference / printed if math.isfinite(printed) else math.nan

    def miss(r):
        return abs(math.log(r)) if math.isfinite(r) and r > 0 else math.inf

    selected = "corrected" if miss(r_c) <= miss(r_p) else "printed"
    return EllipticalAdjudication(reference, printed, corrected, r_p, r_c, selected)


# -- J-integral asymptotics ----------------------------------------------------------


def profile_integral(psi: Callable[[float], float], xi: float, eta: float, tau: Optional[float] = None) -> float:
    """Integral over [xi, eta] of e^{-x} psi(x), with the extra factor 1/sqrt(2x + 2 tau) when tau is given."""
    if not 0 <= xi <= eta:
        raise ValueError("need 0 <= xi <= eta")
    if tau is None:
        def f(x):
            return math.exp(-x) * psi(x)
    else:
        if tau < 0:
            raise ValueError("tau must be nonnegative")
        if tau == 0 and xi == 0:
            # x = s^2/2 removes the endpoint singularity: e^{-s^2/2} psi(s^2/2) ds
            value, _ = piecewise_quad(lambda s: math.exp(-s * s / 2) * psi(s * s / 2), 0.0,
                                      math.sqrt(2 * eta), epsabs=0.0, epsrel=1e-13)
            return value

        def f(x):
            return math.exp(-x) * psi(x) / math.sqrt(2 * x + 2 * tau)
    value, _ = piecewise_quad(f, xi, eta, epsabs=0.0, epsrel=1e-13)
    return value


class Lemma2Case(str, enum.Enum):
    SEPARATED = "a"  # gamma > 1
    BOUNDARY = "b"  # gamma = 1


def lemma2_j_approx(case: Lemma2Case, gamma: float, u: float, radial, weight_scale: float,
                    psi: Callable[[float], float] = lambda s: 1.0, xi: float = 0.0, eta: float = math.inf,
                    tau: float = 0.0) -> float:
    """Leading-order J(a, b, u; h) where h(gamma + s/t) = weight_scale * psi(s) and t = u w(gamma u).

    ``gamma`` is the (finite-n) location gamma_n; for the boundary case the limit is 1 and
    ``tau`` is t (gamma_n - 1).
    """
    case = Lemma2Case(case)
    t = u * float(radial.scaling_w(gamma * u))
    tail = float(radial.survivor(gamma * u))
    if case is Lemma2Case.SEPARATED:
        if not gamma > 1:
            raise ValueError("separated case needs gamma > 1")
        return weight_scale / (gamma * math.sqrt(gamma * gamma - 1)) * tail / t * profile_integral(psi, xi, eta)
    if gamma < 1:
        raise ValueError("boundary case needs gamma >= 1")
    return weight_scale * tail / math.sqrt(t) * profile_integral(psi, xi, eta, tau)


# -- conditional-CDF distance --------------------------------------------------------

SUP_GRID = np.linspace(-6.0, 6.0, 400)


def sup_distance_diagnostic(model: PolarModel, u: float, law: Optional[LimitLaw] = None, y_grid=None) -> float:
    """Max over y of |P(Y <= u(rho + y/sqrt t) | X > u) - limit cdf(y/sqrt(1-rho^2))|."""
    if law is None:
        law = LimitLaw.power(model.angular.delta)
    grid = SUP_GRID if y_grid is None else np.asarray(y_grid, dtype=float)
    t = float(model.radial.t(u))
    scale = math.sqrt(1 - model.rho**2)
    exact = polar_exact.conditional_cdf_grid(model, u, u * (model.rho + grid / math.sqrt(t)))
    return max(abs(e - law.cdf(y / scale)) for e, y in zip(exact, grid))
