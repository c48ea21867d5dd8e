"""
Exact marginal and joint tail probabilities of the polar vector

    X = R cos(Theta),  Y = rho R cos(Theta) + sqrt(1 - rho^2) R sin(Theta).

The building block is the J-integral

    J(a, b, x; h) = int_a^b [1 - F(x t)] h(t) / (t sqrt(t^2 - 1)) dt,

which is evaluated in angle space: with t = 1/cos(theta) (weight ``tilde``)
or t = 1/sin(v) (weight ``bar_rho``) the factor dt / (t sqrt(t^2 - 1)) is
exactly d(angle), so the inverse square-root singularity at t = 1 never
reaches the quadrature.

All integrals are computed relative to a log-scale (the survivor of R at the
smallest radius the integrand sees) and only exponentiated at the end, so
conditional probabilities stay accurate where P(X > x) itself underflows.
"""
from __future__ import annotations

import enum
import hashlib
import json
import math
from dataclasses import dataclass
from typing import NamedTuple, Tuple

from scipy import optimize

from ._quad import piecewise_quad
from .angular import AngularModel
from .radial import RadialModel

# the integrand is cut where it falls below e^{-TRUNC_LOG} of its peak (about 1e-18)
TRUNC_LOG = 18.0 * math.log(10.0)
_LEVELS = (1.0, 4.0, 12.0)
EPSREL = 1e-11
HALF_PI = math.pi / 2


@dataclass(frozen=True)
class PolarModel:
    """Bivariate polar vector with independent radius and angle and pseudo-correlation rho."""

    radial: RadialModel
    angular: AngularModel
    rho: float = 0.0

    def __post_init__(self):
        if not -1.0 < self.rho < 1.0:
            raise ValueError(f"pseudo-correlation must lie in (-1, 1), got {self.rho}")

    @property
    def phi(self) -> float:
        return math.asin(self.rho)

    def descriptor(self) -> dict:
        return {"radial": self.radial.descriptor(), "angular": self.angular.descriptor(), "rho": self.rho}

    def model_hash(self) -> str:
        blob = json.dumps(self.descriptor(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


class Weight(str, enum.Enum):
    TILDE = "tilde"  # h(arccos(1/t))
    BAR_RHO = "bar_rho"  # h(arcsin(1/t) - arcsin(rho))


@dataclass(frozen=True)
class JIntegralSpec:
    a: float
    b: float
    x: float
    weight: Weight = Weight.TILDE

    def __post_init__(self):
        if not (self.a >= 1.0 and self.b >= self.a):
            raise ValueError(f"J-integral limits need 1 <= a <= b, got a={self.a}, b={self.b}")
        if not self.x > 0:
            raise ValueError("J-integral scale x must be positive")


class Scaled(NamedTuple):
    """A probability stored as value * exp(log_scale)."""

    value: float
    log_scale: float

    def to_float(self) -> float:
        if self.value == 0.0:
            return 0.0
        return self.value * math.exp(self.log_scale)

    def log(self) -> float:
        return math.log(self.value) + self.log_scale if self.value > 0 else -math.inf

    def rescale(self, log_scale: float) -> float:
        if self.value == 0.0:
            return 0.0
        return self.value * math.exp(self.log_scale - log_scale)


def alpha_rho(x: float, y: float, rho: float) -> float:
    if not x > 0:
        raise ValueError("alpha_rho requires x > 0")
    return math.sqrt(1.0 + (y / x - rho) ** 2 / (1.0 - rho * rho))


def alpha_star(x: float, y: float, rho: float) -> float:
    if y == 0:
        raise ValueError("alpha_star requires y != 0")
    return alpha_rho(x, y, rho) * x / y


# -- level crossings of the radial log-survivor -------------------------------------


def _crossing_t(radial: RadialModel, x: float, a: float, level: float, t_max: float = math.inf) -> float:
    """Smallest t >= a with log S(x t) - log S(x a) <= -level (inf if none below t_max)."""
    base = radial.log_survivor(x * a)

    def g(t):
        return radial.log_survivor(x * t) - base + level

    step = max(a * 1e-3, 1e-12)
    hi = a + step
    while g(hi) > 0:
        step *= 2.0
        hi = a + step
        if hi >= t_max or x * hi > 1e300:
            return math.inf
    return optimize.brentq(g, a, hi, xtol=1e-14 * hi, rtol=1e-13)


# -- the J-integral in angle space ---------------------------------------------------


def _angle_of_t(weight: Weight, t: float) -> float:
    if math.isinf(t):
        return HALF_PI if weight is Weight.TILDE else 0.0
    return math.acos(1.0 / t) if weight is Weight.TILDE else math.asin(1.0 / t)


def j_integral_scaled(model: PolarModel, spec: JIntegralSpec) -> Tuple[Scaled, float]:
    """J(a, b, x) as Scaled(value, log S(x a)) plus the absolute error estimate (same scale)."""
    radial, ang = model.radial, model.angular
    a, b, x = spec.a, spec.b, spec.x
    log_scale = float(radial.log_survivor(x * a))
    if b == a or not math.isfinite(log_scale):
        return Scaled(0.0, log_scale if math.isfinite(log_scale) else 0.0), 0.0
    t_cut = _crossing_t(radial, x, a, TRUNC_LOG, t_max=b)
    t_hi = min(b, t_cut)
    t_points = [_crossing_t(radial, x, a, lvl, t_max=t_hi) for lvl in _LEVELS]
    u0 = getattr(radial, "u0", 0.0)
    if u0 > x * a:
        t_points.append(u0 / x)
    t_points = [t for t in t_points if a < t < t_hi]

    phi = model.phi
    if spec.weight is Weight.TILDE:

        def f(theta):
            return math.exp(radial.log_survivor(x / math.cos(theta)) - log_scale) * float(ang._density(theta))

        angle_pts = [p for p in ang.breakpoints]
    else:

        def f(v):
            sv = math.sin(v)
            if sv <= 0:
                return 0.0
            return math.exp(radial.log_survivor(x / sv) - log_scale) * float(ang._density(v - phi))

        angle_pts = [p + phi for p in ang.breakpoints]

    lo, hi = sorted((_angle_of_t(spec.weight, a), _angle_of_t(spec.weight, t_hi)))
    pts = [_angle_of_t(spec.weight, t) for t in t_points] + angle_pts
    value, err = piecewise_quad(f, lo, hi, points=pts, epsabs=1e-15, epsrel=EPSREL)
    if t_hi < b:
        # rapid variation: the discarded tail is below S(x t_cut) times the angular mass (<= 1)
        err += math.exp(-TRUNC_LOG)
    return Scaled(value, log_scale), err


def j_integral(model: PolarModel, spec: JIntegralSpec) -> float:
    """J(a, b, x; h~ or h-bar_rho) as a plain float."""
    scaled, _ = j_integral_scaled(model, spec)
    return scaled.to_float()


# -- marginal ------------------------------------------------------------------------


def survivor_x_scaled(model: PolarModel, x: float) -> Scaled:
    if not x > 0:
        raise ValueError("survivor_x requires x > 0")
    j, _ = j_integral_scaled(model, JIntegralSpec(1.0, math.inf, x, Weight.TILDE))
    return Scaled(2.0 * j.value, j.log_scale)


def survivor_x(model: PolarModel, x: float) -> float:
    """P(X > x) = 2 J(1, inf, x; h~)."""
    return survivor_x_scaled(model, x).to_float()


def log_survivor_x(model: PolarModel, x: float) -> float:
    return survivor_x_scaled(model, x).log()


# -- joint ---------------------------------------------------------------------------


def _joint_branch_b(model: PolarModel, x: float, y: float) -> Scaled:
    # y in (0, x], y/x > rho
    al = alpha_rho(x, y, model.rho)
    j1, _ = j_integral_scaled(model, JIntegralSpec(al, math.inf, x, Weight.TILDE))
    j2, _ = j_integral_scaled(model, JIntegralSpec(max(1.0, al * x / y), math.inf, y, Weight.BAR_RHO))
    scale = j1.log_scale
    return Scaled(j1.value + j2.rescale(scale), scale)


def _joint_branch_c(model: PolarModel, x: float, y: float) -> Scaled:
    # rho > 0, 0 < y/x < rho
    al = alpha_rho(x, y, model.rho)
    whole = survivor_x_scaled(model, x)
    j1, _ = j_integral_scaled(model, JIntegralSpec(al, math.inf, x, Weight.TILDE))
    j2, _ = j_integral_scaled(model, JIntegralSpec(max(1.0, al * x / y), math.inf, y, Weight.BAR_RHO))
    scale = whole.log_scale
    return Scaled(whole.value - j1.rescale(scale) + j2.rescale(scale), scale)


def _joint_general(model: PolarModel, x: float, y: float) -> Scaled:
    """P(X > x, Y > y) by integrating P(L(theta) < R < U(theta)) h(theta) over cos(theta) > 0.

    L = max(x / cos(theta), y / sin(theta + phi)) where the Y-constraint is a lower
    bound on R, U = y / sin(theta + phi) where it is an upper bound (y < 0).
    """
    radial, ang, rho, phi = model.radial, model.angular, model.rho, model.phi
    sq = math.sqrt(1.0 - rho * rho)
    cross = math.atan((y / x - rho) / sq)  # where x/cos(theta) = y/sin(theta+phi)

    def lower(theta):
        c = math.cos(theta)
        s = math.sin(theta + phi)
        low = x / c
        if y > 0:
            if s <= 0:
                return math.inf
            low = max(low, y / s)
        return low

    def upper(theta):
        s = math.sin(theta + phi)
        if y < 0 and s < 0:
            return y / s
        if y >= 0 and s <= 0:
            return 0.0
        return math.inf

    peak = cross if (y > 0 and cross > 0) else 0.0
    log_scale = float(radial.log_survivor(lower(peak)))

    def logdrop(theta):
        return radial.log_survivor(min(lower(theta), 1e300)) - log_scale

    # truncation and resolution points on both sides of the unimodal peak
    def side_points(end):
        out = []
        if logdrop(end) > -TRUNC_LOG:
            return out, end
        cut = end
        for lvl in (*_LEVELS, TRUNC_LOG):
            th = optimize.brentq(lambda th: logdrop(th) + lvl, *sorted((peak, end)), xtol=1e-15)
            out.append(th)
            cut = th
        return out, cut

    eps = 1e-15
    right_pts, right = side_points(HALF_PI - eps)
    left_pts, left = side_points(-HALF_PI + eps)

    def f(theta):
        low = lower(theta)
        up = upper(theta)
        if up <= low:
            return 0.0
        val = math.exp(radial.log_survivor(min(low, 1e300)) - log_scale)
        if math.isfinite(up):
            val -= math.exp(radial.log_survivor(up) - log_scale)
        return max(val, 0.0) * float(ang._density(theta))

    u0 = getattr(radial, "u0", 0.0)
    pts = [peak, cross, -phi, *right_pts, *left_pts, *ang.breakpoints]
    if u0 > x:
        pts += [math.acos(x / u0), -math.acos(x / u0)]
    value, _ = piecewise_quad(f, left, right, points=pts, epsabs=1e-15, epsrel=EPSREL)
    return Scaled(value, log_scale)


def joint_survivor_scaled(model: PolarModel, x: float, y: float) -> Scaled:
    if not x > 0:
        raise ValueError("joint_survivor requires x > 0")
    rho = model.rho
    ratio = y / x
    if 0 < y <= x and ratio > rho:
        return _joint_branch_b(model, x, y)
    if rho > 0 and 0 < ratio < rho:
        return _joint_branch_c(model, x, y)
    return _joint_general(model, x, y)


def joint_survivor(model: PolarModel, x: float, y: float) -> float:
    """P(X > x, Y > y) for x > 0 and any real y."""
    return joint_survivor_scaled(model, x, y).to_float()


def joint_survivor_branches(model: PolarModel, x: float, y: float) -> dict:
    """Every representation that applies at (x, y), keyed by name, for cross-checks."""
    out = {"general": _joint_general(model, x, y).to_float()}
    if y > 0 and y <= x and y / x >= model.rho:
        out["lemma_b"] = _joint_branch_b(model, x, y).to_float()
    if model.rho > 0 and 0 < y / x <= model.rho:
        out["lemma_c"] = _joint_branch_c(model, x, y).to_float()
    return out


# -- conditional ---------------------------------------------------------------------

UNDERFLOW_GUARD = 1e-300


def conditional_cdf(model: PolarModel, u: float, y: float) -> float:
    """P(Y <= y | X > u)."""
    marginal = survivor_x_scaled(model, u)
    if marginal.to_float() < UNDERFLOW_GUARD:
        raise FloatingPointError(f"P(X > {u}) underflows; conditional probability not computed")
    joint = joint_survivor_scaled(model, u, y)
    ratio = joint.rescale(marginal.log_scale) / marginal.value
    return min(1.0, max(0.0, 1.0 - ratio))


def conditional_survivor_ratio(model: PolarModel, u: float, y: float) -> float:
    """P(Y > y | X > u) without the underflow guard (both terms stay in log-scale)."""
    marginal = survivor_x_scaled(model, u)
    joint = joint_survivor_scaled(model, u, y)
    return joint.rescale(marginal.log_scale) / marginal.value


def conditional_cdf_grid(model: PolarModel, u: float, y_grid) -> list:
    """conditional_cdf over a y-grid, sharing one evaluation of P(X > u)."""
    marginal = survivor_x_scaled(model, u)
    if marginal.to_float() < UNDERFLOW_GUARD:
        raise FloatingPointError(f"P(X > {u}) underflows; conditional probability not computed")
    out = []
    for y in y_grid:
        joint = joint_survivor_scaled(model, u, float(y))
        out.append(min(1.0, max(0.0, 1.0 - joint.rescale(marginal.log_scale) / marginal.value)))
    return out
