"""Invariant checks run by ``polar-tails validate``.

Each check returns a CheckResult; the suite passes iff every check does.
Checks that need a model use the configured one; the Gaussian-oracle checks
always use the chi-squared radius with uniform angle, where X and Y are
exactly (correlated) standard normals.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, List

import numpy as np
from scipy import stats

from . import asymptotics as asy
from . import polar_exact as pe
from . import sampling
from .angular import UniformAngular
from .radial import KotzRadial


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.detail}"


def _normal_sf(z: float) -> float:
    return 0.5 * math.erfc(z / math.sqrt(2.0))


def _gaussian(rho: float = 0.0) -> pe.PolarModel:
    return pe.PolarModel(KotzRadial.chi2df(), UniformAngular(), rho)


def check_gaussian_marginal(model, seed) -> CheckResult:
    g = _gaussian()
    worst = max(abs(pe.survivor_x(g, u) / _normal_sf(u) - 1) for u in (1.0, 2.0, 3.0))
    return CheckResult("gaussian marginal", worst < 1e-7, f"max rel err {worst:.2e} (tol 1e-7)")


def check_gaussian_joint(model, seed) -> CheckResult:
    g = _gaussian()
    err = abs(pe.joint_survivor(g, 1.0, 1.0) / _normal_sf(1.0) ** 2 - 1)
    return CheckResult("gaussian joint (rho=0)", err < 1e-6, f"rel err {err:.2e} (tol 1e-6)")


def check_branch_continuity(model, seed) -> CheckResult:
    m = pe.PolarModel(model.radial, model.angular, 0.5)
    x = 2.0
    lo = pe.joint_survivor(m, x, x * (0.5 - 1e-9))
    hi = pe.joint_survivor(m, x, x * (0.5 + 1e-9))
    jump = abs(hi - lo)
    return CheckResult("branch continuity at y/x=rho", jump < 1e-7, f"jump {jump:.2e} (tol 1e-7)")


def check_bounds(model, seed) -> CheckResult:
    bad = 0
    for x in (0.5, 1.5, 3.0):
        sx = pe.survivor_x(model, x)
        for y in (-3.0, -0.5, 0.0, 0.7, 2.0, 4.0):
            j = pe.joint_survivor(model, x, y)
            if not (0.0 <= j <= min(sx, 1.0) * (1 + 1e-9) + 1e-15):
                bad += 1
    return CheckResult("0 <= joint <= marginal", bad == 0, f"{bad} violations on an 18-point grid")


def check_conditional_monotone(model, seed) -> CheckResult:
    u = 2.0
    ys = np.linspace(-6.0, 6.0, 100)
    vals = pe.conditional_cdf_grid(model, u, ys)
    drops = sum(1 for a, b in zip(vals, vals[1:]) if b < a - 1e-12)
    return CheckResult("conditional cdf nondecreasing", drops == 0, f"{drops} decreases on a 100-point grid")


def check_limit_law(model, seed) -> CheckResult:
    worst = 0.0
    for d in (0.0, 0.5, 1.0, 2.0):
        law = asy.LimitLaw.power(d)
        worst = max(worst, max(abs(law.closed_form_cdf(z) - law.numeric_cdf(z)) for z in np.linspace(-6, 6, 49)))
    return CheckResult("limit law closed form", worst < 1e-8, f"max abs diff {worst:.2e} (tol 1e-8)")


def check_thm1_thm3(model, seed) -> CheckResult:
    u = 20.0
    a = asy.thm1_log_survivor_approx(model, u)
    b = asy.thm3_log_survivor_approx(model, u)
    err = abs(a - b)
    return CheckResult("profile vs power-constant approximation", err < 1e-12, f"log diff {err:.2e}")


def check_second_order_rho0(model, seed) -> CheckResult:
    law = asy.LimitLaw.power(model.angular.delta)
    err = max(abs(asy.thm4_second_order(z, 0.0, t, law) - law.sf(z)) for z in (-2, -0.5, 0, 1, 3) for t in (10, 1e4))
    return CheckResult("second order at rho=0", err == 0.0, f"max diff {err:.1e}")


def check_mc_agreement(model, seed) -> CheckResult:
    n = 10**6
    batch = sampling.sample_polar(model, n, seed)
    worst = 0.0
    for p in (1e-1, 1e-2, 1e-3):
        u = float(np.quantile(batch.x, 1 - p))
        exact = pe.survivor_x(model, u)
        se = math.sqrt(exact * (1 - exact) / n)
        worst = max(worst, abs(sampling.empirical_survivor(batch, u) - exact) / se)
    return CheckResult("monte carlo vs quadrature", worst <= 4.0, f"max |z| {worst:.2f} (tol 4)")


def check_reproducible(model, seed) -> CheckResult:
    a = sampling.sample_polar(model, 5000, seed, threads=1)
    b = sampling.sample_polar(model, 5000, seed, threads=4)
    same = np.array_equal(a.x, b.x) and np.array_equal(a.y, b.y)
    return CheckResult("reproducible batches", same, "identical across thread counts" if same else "batches differ")


def check_stream_independence(model, seed) -> CheckResult:
    n = 10**5
    a = sampling.sample_polar(model, n, seed)
    b = sampling.sample_polar(model, n, (seed + 1) % 2**64)
    # rank correlation: its null spread is 1/sqrt(n-1) whatever the tail of X
    r = abs(stats.spearmanr(a.x, b.x).statistic)
    return CheckResult("adjacent seeds uncorrelated", r < 4 / math.sqrt(n), f"|corr| {r:.2e} (tol {4 / math.sqrt(n):.1e})")


def check_angular_mass(model, seed) -> CheckResult:
    err = abs(model.angular.total_mass() - 1.0)
    return CheckResult("angular density normalized", err < 1e-9, f"|mass - 1| {err:.1e}")


def check_quantile_roundtrip(model, seed) -> CheckResult:
    ps = np.array([0.5, 1e-3, 1e-8])
    qs = model.radial.quantile(ps)
    err = float(np.max(np.abs(model.radial.survivor(qs) / ps - 1)))
    return CheckResult("radial quantile roundtrip", err < 1e-9, f"max rel err {err:.1e}")


CHECKS: List[Callable] = [
    check_gaussian_marginal,
    check_gaussian_joint,
    check_branch_continuity,
    check_bounds,
    check_conditional_monotone,
    check_limit_law,
    check_thm1_thm3,
    check_second_order_rho0,
    check_angular_mass,
    check_quantile_roundtrip,
    check_reproducible,
    check_stream_independence,
    check_mc_agreement,
]


def run_suite(model: pe.PolarModel, seed: int) -> List[CheckResult]:
    return [check(model, seed) for check in CHECKS]
