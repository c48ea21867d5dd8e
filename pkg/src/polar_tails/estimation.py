"""Estimators for the conditional tail model from an i.i.d. sample.

rho is estimated from the ratios Y/X among the largest X, the scaling
function from a Weibull-type log-log fit of the empirical survivor of X,
and delta from the behaviour of the angle distribution near 0.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .asymptotics import LimitLaw
from .errors import ConfigError, InsufficientDataError
from .sampling import SampleBatch

MIN_TOP_K = 50
MIN_TAIL_POINTS = 200
MIN_ANGLE_POINTS = 100
ANGLE_QUANTILE = 0.05
RHO_CLIP = 1.0 - 1e-9


@dataclass(frozen=True)
class WFit:
    c: float
    gamma: float
    residual_rms: float
    n_points: int

    def w(self, u):
        return self.c * self.gamma * np.power(u, self.gamma - 1.0)


@dataclass(frozen=True)
class DeltaEstimate:
    delta: float
    source: str  # "estimated" or "provided"
    k: int = 0


@dataclass
class EstimatorReport:
    rho_hat: float
    c_hat: float
    gamma_hat: float
    delta_hat: float
    delta_source: str
    k_used: int
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        if not (self.c_hat > 0 and self.gamma_hat > 0):
            raise ValueError("scaling-function parameters must be positive")
        if not abs(self.rho_hat) < 1:
            raise ValueError("rho_hat must lie in (-1, 1)")

    def w_hat(self, u):
        return self.c_hat * self.gamma_hat * np.power(u, self.gamma_hat - 1.0)

    def law(self) -> LimitLaw:
        return LimitLaw.power(self.delta_hat)

    def to_text(self) -> str:
        lines = []
        for key, value in asdict(self).items():
            if key == "diagnostics":
                continue
            lines.append(f"{key}={_fmt(value)}")
        for key, value in sorted(self.diagnostics.items()):
            lines.append(f"diag.{key}={_fmt(value)}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "EstimatorReport":
        values, diag = {}, {}
        for raw in text.splitlines():
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ValueError(f"malformed report line: {line}")
            key, value = key.strip(), value.strip()
            if key.startswith("diag."):
                diag[key[5:]] = _parse(value)
            else:
                values[key] = _parse(value)
        try:
            return cls(
                rho_hat=float(values["rho_hat"]),
                c_hat=float(values["c_hat"]),
                gamma_hat=float(values["gamma_hat"]),
                delta_hat=float(values["delta_hat"]),
                delta_source=str(values["delta_source"]),
                k_used=int(values["k_used"]),
                diagnostics=diag,
            )
        except KeyError as exc:
            raise ValueError(f"report is missing {exc.args[0]}") from None


def _fmt(value) -> str:
    if isinstance(value, (bool, str)):
        return str(value)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def _parse(value: str):
    for conv in (int, float):
        try:
            return conv(value)
        except ValueError:
            pass
    return value


# -- rho -----------------------------------------------------------------------------


def estimate_rho(batch: SampleBatch, k: int) -> float:
    """Median of Y/X over the k largest X."""
    n = len(batch)
    if k < MIN_TOP_K:
        raise InsufficientDataError(f"k={k} is below the minimum of {MIN_TOP_K}", k)
    if k > n // 10:
        raise InsufficientDataError(f"k={k} exceeds n/10 for n={n}", n)
    top = np.argpartition(batch.x, n - k)[n - k:]
    if np.any(batch.x[top] <= 0):
        raise InsufficientDataError("top order statistics of X must be positive", k)
    rho = float(np.median(batch.y[top] / batch.x[top]))
    if abs(rho) >= 1:
        warnings.warn(f"rho estimate {rho} clipped into (-1, 1)", RuntimeWarning, stacklevel=2)
        rho = math.copysign(RHO_CLIP, rho)
    return rho


# -- scaling function ----------------------------------------------------------------


def _loglog_fit(u: np.ndarray, survivor: np.ndarray) -> WFit:
    lx = np.log(u)
    ly = np.log(-np.log(survivor))
    if np.var(lx) < 1e-12 * max(1.0, float(np.mean(lx * lx))):
        raise InsufficientDataError("degenerate tail fit: threshold spread is too small", u.size)
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (intercept + slope * lx)
    if not slope > 0:
        raise InsufficientDataError(f"tail fit produced a nonpositive exponent ({slope:.3g})", u.size)
    return WFit(c=float(math.exp(intercept)), gamma=float(slope),
                residual_rms=float(np.sqrt(np.mean(resid**2))), n_points=int(u.size))


def estimate_w_params(x_sample, tail_fraction: float = 0.1) -> WFit:
    """Fit -log S(u) = c u^gamma on the top tail_fraction of the sample, so w(u) = c gamma u^(gamma-1)."""
    if not 0 < tail_fraction <= 0.2:
        raise ConfigError(f"tail_fraction must lie in (0, 0.2], got {tail_fraction}")
    x = np.sort(np.asarray(x_sample, dtype=float))[::-1]
    n = x.size
    k = int(math.floor(tail_fraction * n))
    if k < MIN_TAIL_POINTS:
        raise InsufficientDataError(f"{k} tail points; need {MIN_TAIL_POINTS}", k)
    top = x[:k]
    # empirical survivor at the i-th largest value, i = 1..k
    surv = np.arange(1, k + 1) / (n + 1.0)
    keep = top > 0
    if keep.sum() < MIN_TAIL_POINTS:
        raise InsufficientDataError("too few positive tail points", int(keep.sum()))
    return _loglog_fit(top[keep], surv[keep])


def estimate_w_params_exact(u_grid, survivor_values) -> WFit:
    """Same log-log fit on exact survivor values (no sampling noise)."""
    u = np.asarray(u_grid, dtype=float)
    s = np.asarray(survivor_values, dtype=float)
    if u.size < 2 or np.any(u <= 0) or np.any((s <= 0) | (s >= 1)):
        raise ValueError("need at least two positive thresholds with survivor values in (0, 1)")
    return _loglog_fit(u, s)


# -- delta ---------------------------------------------------------------------------


def angles_from_pairs(x, y, rho: float) -> np.ndarray:
    """Recover the angle of each pair given the pseudo-correlation."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return np.arctan2((y - rho * x) / math.sqrt(1 - rho * rho), x)


def estimate_delta(angles=None, provided: Optional[float] = None) -> DeltaEstimate:
    """Index of the |angle| distribution at 0 from its smallest order statistics.

    P(|angle| <= s) ~ C s^(2 delta + 1); the log-spacing estimator over the
    values below the 5th percentile estimates the exponent.
    """
    if angles is None:
        if provided is None:
            raise ConfigError("estimate_delta needs angles or a provided value")
        if not provided > -0.5:
            raise ConfigError("provided delta must exceed -1/2")
        return DeltaEstimate(float(provided), "provided")
    s = np.sort(np.abs(np.asarray(angles, dtype=float)))
    k = int(math.floor(ANGLE_QUANTILE * s.size))
    if k < MIN_ANGLE_POINTS:
        raise InsufficientDataError(f"{k} angles below the {ANGLE_QUANTILE:.0%} quantile; need {MIN_ANGLE_POINTS}", k)
    small = s[:k]
    edge = s[k]
    if np.any(small <= 0):
        small = small[small > 0]
    index = small.size / float(np.sum(np.log(edge / small)))
    return DeltaEstimate(float((index - 1.0) / 2.0), "estimated", int(small.size))


# -- conditional CDF estimators ------------------------------------------------------


def psi_hat(report: EstimatorReport, x: float, y: float, variant: int = 1) -> float:
    """Estimated P(Y <= y | X > x) from the limit law with fitted parameters."""
    if variant not in (1, 2):
        raise ValueError("variant must be 1 or 2")
    w = float(report.w_hat(x))
    if not (x > 0 and w > 0):
        raise ValueError("threshold must be positive")
    if x * w <= 10:
        warnings.warn(f"x w(x) = {x * w:.3g} <= 10; the limit approximation is unreliable", RuntimeWarning,
                      stacklevel=2)
    rho = report.rho_hat
    centre = rho * x if variant == 1 else rho * (x + 1.0 / w)
    scale = math.sqrt((1 - rho * rho) * x / w)
    return report.law().cdf((y - centre) / scale)


def estimate(batch: SampleBatch, k: int = 2000, tail_fraction: float = 0.1, angles=None,
             provided_delta: Optional[float] = None) -> EstimatorReport:
    """All estimators on one batch. Angles are reconstructed from (x, y, rho_hat) when not given."""
    rho = estimate_rho(batch, k)
    wfit = estimate_w_params(batch.x, tail_fraction)
    if provided_delta is not None:
        d = estimate_delta(provided=provided_delta)
    else:
        if angles is None:
            angles = batch.angles if batch.angles is not None else angles_from_pairs(batch.x, batch.y, rho)
        d = estimate_delta(angles)
    if not d.delta > -0.5:
        warnings.warn(f"delta estimate {d.delta} raised to the admissible range", RuntimeWarning, stacklevel=2)
        d = DeltaEstimate(-0.5 + 1e-6, d.source, d.k)
    diag = {"n": len(batch), "w_fit_rms": wfit.residual_rms, "w_fit_points": wfit.n_points, "delta_k": d.k}
    return EstimatorReport(rho_hat=rho, c_hat=wfit.c, gamma_hat=wfit.gamma, delta_hat=d.delta,
                           delta_source=d.source, k_used=k, diagnostics=diag)
