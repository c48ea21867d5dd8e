import math
import warnings

from scipy import integrate

from .errors import QuadratureError

EPSREL = 1e-11
LIMIT = 400


def piecewise_quad(f, a, b, points=(), epsabs=0.0, epsrel=EPSREL, limit=LIMIT, fail_rel=1e-8):
    """Adaptive Gauss-Kronrod over [a, b] split at ``points``.

    Splitting puts kinks, cutoffs and integrable singularities on panel
    endpoints, where QAGS extrapolation handles them. Returns
    ``(value, abserr)``. A panel that QUADPACK flags is accepted when its
    error estimate is below ``fail_rel`` relative (or 10x the absolute
    tolerance); otherwise QuadratureError is raised.
    """
    if b < a:
        value, err = piecewise_quad(f, b, a, points, epsabs, epsrel, limit, fail_rel)
        return -value, err
    if a == b:
        return 0.0, 0.0
    cuts = sorted({p for p in points if a < p < b})
    edges = [a, *cuts, b]
    total = 0.0
    total_err = 0.0
    panel_abs = epsabs / max(len(edges) - 1, 1)
    for lo, hi in zip(edges[:-1], edges[1:]):
        if hi - lo <= 0.0:
            continue
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            out = integrate.quad(f, lo, hi, epsabs=panel_abs, epsrel=epsrel, limit=limit, full_output=1)
        value, err = out[0], out[1]
        if not math.isfinite(value):
            raise QuadratureError(f"non-finite integral on [{lo}, {hi}]", value, err)
        # quad appends a message only when QUADPACK reports ier > 0
        message = out[3] if len(out) > 3 else None
        if message and err > max(10 * panel_abs, fail_rel * abs(value)):
            raise QuadratureError(f"quadrature failed on [{lo}, {hi}]: {message}", value, err)
        total += value
        total_err += err
    return total, total_err
