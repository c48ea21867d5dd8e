import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from scipy import integrate

from conftest import gaussian_model, normal_cdf, normal_sf
from polar_tails import polar_exact as pe
from polar_tails import sampling
from polar_tails.angular import DirichletAngular, UniformAngular
from polar_tails.radial import KotzRadial

# J(1, inf, 5) for the exponential radius and uniform angle, computed in t-space with
# mpmath tanh-sinh quadrature at 30 digits (independent of the angle-space route)
J_EXP_UNIFORM_X5 = 5.42549025672582375248988e-4
# same with the Dirichlet(1, 1) angle
J_EXP_DIRICHLET_X5 = 4.38900446385319136679964e-4


def bvn_survivor(x, y, rho):
    """P(X > x, Y > y) for a standard bivariate normal, integrating over X in s-space."""
    s = math.sqrt(1 - rho * rho)

    def f(v):
        return math.exp(-v * v / 2) / math.sqrt(2 * math.pi) * normal_sf((y - rho * v) / s)

    value, _ = integrate.quad(f, x, math.inf, epsabs=0, epsrel=1e-13, limit=200)
    return value


def test_alpha_examples():
    assert pe.alpha_rho(1, 1, 0) == pytest.approx(math.sqrt(2))
    assert pe.alpha_rho(3.7, 0.4 * 3.7, 0.4) == pytest.approx(1.0)
    assert pe.alpha_star(2, 1, 0) == pytest.approx(math.sqrt(5))
    with pytest.raises(ValueError):
        pe.alpha_star(1, 0, 0)
    with pytest.raises(ValueError):
        pe.alpha_rho(0, 1, 0)


def test_j_integral_matches_tanh_sinh(exp_uniform, exp_dirichlet):
    spec = pe.JIntegralSpec(1.0, math.inf, 5.0)
    assert pe.j_integral(exp_uniform, spec) == pytest.approx(J_EXP_UNIFORM_X5, rel=1e-9)
    assert pe.j_integral(exp_dirichlet, spec) == pytest.approx(J_EXP_DIRICHLET_X5, rel=1e-9)


def test_bar_weight_matches_tanh_sinh():
    rho, a, y = 0.5, 1.2, 3.0
    model = pe.PolarModel(KotzRadial(1.0, 0.0, 1.0, 1.0), DirichletAngular(0.8, 1.3), rho)
    phi = math.asin(rho)
    mp.mp.dps = 25

    def integrand(t):
        v = mp.asin(1 / t)
        return mp.e ** (-y * t) * float(model.angular.density(float(v) - phi)) / (t * mp.sqrt(t * t - 1))

    ref = float(mp.quad(integrand, [a, 2, 6, mp.inf]))
    got = pe.j_integral(model, pe.JIntegralSpec(a, math.inf, y, pe.Weight.BAR_RHO))
    assert got == pytest.approx(ref, rel=1e-8)


def test_empty_interval(exp_uniform):
    assert pe.j_integral(exp_uniform, pe.JIntegralSpec(2.0, 2.0, 1.0)) == 0.0


def test_invalid_spec():
    with pytest.raises(ValueError):
        pe.JIntegralSpec(0.5, 2.0, 1.0)
    with pytest.raises(ValueError):
        pe.JIntegralSpec(1.0, 2.0, -1.0)
    with pytest.raises(ValueError):
        pe.PolarModel(KotzRadial(), UniformAngular(), 1.0)


@pytest.mark.parametrize("x", [1.0, 2.0, 3.0])
def test_gaussian_marginal(gaussian, x):
    assert 2 * pe.j_integral(gaussian, pe.JIntegralSpec(1.0, math.inf, x)) == pytest.approx(normal_sf(x), rel=1e-9)


def test_gaussian_five_percent(gaussian):
    assert pe.survivor_x(gaussian, 1.959964) == pytest.approx(0.025, rel=1e-6)


def test_survivor_against_monte_carlo(exp_uniform):
    n = 10**7
    batch = sampling.sample_polar(exp_uniform, n, seed=2024)
    p = pe.survivor_x(exp_uniform, 5.0)
    se = math.sqrt(p * (1 - p) / n)
    assert abs(sampling.empirical_survivor(batch, 5.0) - p) < 4 * se


def test_survivor_near_zero_is_half(exp_dirichlet):
    assert pe.survivor_x(exp_dirichlet, 1e-8) == pytest.approx(0.5, abs=1e-6)


def test_gaussian_joint_independent(gaussian):
    assert pe.joint_survivor(gaussian, 1.0, 1.0) == pytest.approx(normal_sf(1.0) ** 2, rel=1e-9)


def test_far_negative_y_is_vacuous(gaussian):
    assert pe.joint_survivor(gaussian, 2.0, -1e6) == pytest.approx(pe.survivor_x(gaussian, 2.0), abs=1e-6)


def test_branches_agree_at_boundary():
    model = pe.PolarModel(KotzRadial(1.0, 0.0, 1.0, 1.0), DirichletAngular(0.8, 1.3), 0.5)
    x = 2.0
    above = pe._joint_branch_b(model, x, x * (0.5 + 1e-9)).to_float()
    below = pe._joint_branch_c(model, x, x * (0.5 - 1e-9)).to_float()
    boundary = pe.joint_survivor(model, x, 0.5 * x)
    assert above == pytest.approx(below, abs=1e-7)
    assert boundary == pytest.approx(above, abs=1e-7)


@pytest.mark.parametrize("rho", [-0.7, 0.0, 0.5, 0.9])
@pytest.mark.parametrize("x,y", [(1.0, 1.0), (2.0, 0.3), (1.5, -1.0), (0.5, 2.5), (3.0, 2.9)])
def test_gaussian_joint_all_regions(rho, x, y):
    ref = bvn_survivor(x, y, rho)
    assert pe.joint_survivor(gaussian_model(rho), x, y) == pytest.approx(ref, rel=1e-8)


_DIR = DirichletAngular(0.6, 1.4)


@given(x=st.floats(0.2, 4.0), ratio=st.floats(0.02, 1.0), rho=st.floats(-0.9, 0.9))
@settings(max_examples=60, deadline=None)
def test_closed_form_branches_match_general(x, ratio, rho):
    assume(abs(ratio - rho) > 1e-6)
    model = pe.PolarModel(KotzRadial(1.0, 0.0, 1.0, 1.5), _DIR, rho)
    values = pe.joint_survivor_branches(model, x, ratio * x)
    general = values.pop("general")
    for v in values.values():
        assert v == pytest.approx(general, rel=1e-8, abs=1e-15)


@given(x=st.floats(0.1, 5.0), y=st.floats(-6.0, 6.0), rho=st.floats(-0.95, 0.95))
@settings(max_examples=60, deadline=None)
def test_joint_bounds(x, y, rho):
    model = pe.PolarModel(KotzRadial.chi2df(), _DIR, rho)
    j = pe.joint_survivor(model, x, y)
    assert 0.0 <= j <= pe.survivor_x(model, x) * (1 + 1e-10)


@given(x1=st.floats(0.1, 6.0), x2=st.floats(0.1, 6.0))
@settings(max_examples=40, deadline=None)
def test_survivor_nonincreasing(x1, x2):
    model = pe.PolarModel(KotzRadial(1.0, 0.0, 1.0, 1.0), _DIR, 0.0)
    lo, hi = sorted((x1, x2))
    assert pe.survivor_x(model, hi) <= pe.survivor_x(model, lo) * (1 + 1e-12)


def test_conditional_symmetric_case(gaussian):
    assert pe.conditional_cdf(gaussian, 2.0, 0.0) == pytest.approx(0.5, abs=1e-10)


def test_conditional_gaussian(gaussian_half):
    u, y = 2.0, 1.3
    ref = 1 - bvn_survivor(u, y, 0.5) / normal_sf(u)
    assert pe.conditional_cdf(gaussian_half, u, y) == pytest.approx(ref, rel=1e-8)


def test_conditional_monotone_and_limits():
    model = pe.PolarModel(KotzRadial(1.0, 0.0, 1.0, 1.0), DirichletAngular(1.0, 1.0), 0.3)
    vals = pe.conditional_cdf_grid(model, 3.0, np.linspace(-8, 8, 100))
    assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))
    assert pe.conditional_cdf(model, 3.0, -1e4) == pytest.approx(0.0, abs=1e-12)
    assert pe.conditional_cdf(model, 3.0, 1e4) == pytest.approx(1.0, abs=1e-12)


def test_conditional_deep_tail_stays_accurate(gaussian_half):
    # P(X > 30) ~ 5e-198; the ratio is computed in log-scale
    u = 30.0
    val = pe.conditional_cdf(gaussian_half, u, 15.0)
    assert 0.45 < val < 0.55


def test_underflow_guard(gaussian):
    with pytest.raises(FloatingPointError):
        pe.conditional_cdf(gaussian, 40.0, 0.0)


def test_model_hash_stable():
    a = gaussian_model(0.5).model_hash()
    assert a == gaussian_model(0.5).model_hash()
    assert a != gaussian_model(0.4).model_hash()
    assert len(a) == 16
