import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special as sp
from scipy import stats

from polar_tails.angular import (CustomAngular, DirichletAngular, UniformAngular, angular_second_order_violation,
                                 psi_consistency_gap)


def dirichlet_cdf_oracle(theta, a, b):
    """P(Theta <= theta) for the full-circle Dirichlet law, via the regularized incomplete beta."""
    s = abs(theta)
    if s <= math.pi / 2:
        half = 0.25 * sp.betainc(a, b, math.sin(s) ** 2)
    else:
        half = 0.5 - 0.25 * sp.betainc(a, b, math.sin(math.pi - s) ** 2)
    return 0.5 + math.copysign(half, theta)


def test_uniform_density_and_cdf():
    u = UniformAngular()
    assert u.density(0.3) == pytest.approx(1 / (2 * math.pi))
    assert u.cdf(0.0) == pytest.approx(0.5)
    assert u.delta == 0.0


def test_dirichlet_examples():
    assert DirichletAngular(1.0, 1.0).density(math.pi / 4) == pytest.approx(0.25)
    assert DirichletAngular(0.5, 0.5).cdf(math.pi / 2) == pytest.approx(0.75, abs=1e-8)
    assert DirichletAngular(1.5, 2.0).delta == pytest.approx(1.0)


@pytest.mark.parametrize("a,b", [(0.5, 0.5), (1.0, 1.0), (0.3, 0.2), (2.0, 0.7)])
def test_normalized(a, b):
    assert DirichletAngular(a, b).total_mass() == pytest.approx(1.0, abs=1e-10)


def test_truncated_support_normalized():
    m = DirichletAngular(1.5, 2.0, eps=1.0)
    assert m.total_mass() == pytest.approx(1.0, abs=1e-10)
    assert m.density(1.2) == 0.0


@pytest.mark.parametrize("a,b", [(0.3, 0.2), (1.0, 1.0), (2.5, 0.6)])
def test_table_matches_incomplete_beta(a, b):
    m = DirichletAngular(a, b)
    grid = np.linspace(-3.14, 3.14, 301)
    err = max(abs(m.cdf(t) - dirichlet_cdf_oracle(t, a, b)) for t in grid)
    assert err < 1e-5


_SKEWED = DirichletAngular(0.7, 0.4)


@given(t1=st.floats(-math.pi, math.pi), t2=st.floats(-math.pi, math.pi))
@settings(max_examples=100, deadline=None)
def test_cdf_monotone_and_symmetric(t1, t2):
    m = _SKEWED
    lo, hi = sorted((t1, t2))
    assert m.cdf(lo) <= m.cdf(hi) + 1e-15
    assert m.cdf(-t1) == pytest.approx(1 - m.cdf(t1), abs=1e-12)


def test_density_domain():
    with pytest.raises(ValueError):
        UniformAngular().density(4.0)


@pytest.mark.parametrize("a,b", [(1.0, 1.0), (0.3, 0.2)])
def test_sampler_ks(a, b):
    m = DirichletAngular(a, b)
    x = m.sample(np.random.default_rng(11), 200000)
    res = stats.kstest(x, np.vectorize(lambda t: dirichlet_cdf_oracle(t, a, b)))
    assert res.pvalue > 1e-3


def test_psi_consistency():
    m = DirichletAngular(1.0, 1.0)
    assert psi_consistency_gap(m, 1e6, np.linspace(0.1, 3, 10)) < 1e-4


def test_uniform_second_order_exact():
    u = UniformAngular()
    assert angular_second_order_violation(u, [10, 100], np.linspace(0.01, 5, 20)) <= 0.0


def test_custom_angular():
    m = CustomAngular(lambda th: np.full(np.shape(th), 1 / (2 * math.pi)), delta=0.0, name="flat")
    assert m.total_mass() == pytest.approx(1.0)
    assert m.cdf(math.pi / 2) == pytest.approx(0.75, abs=1e-8)
