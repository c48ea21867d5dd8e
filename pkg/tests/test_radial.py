import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polar_tails.radial import (CustomRadial, FamilyTag, KotzRadial, mda_ratio_diagnostic,
                                second_order_violation, self_neglecting_ratio)


def test_exponential_survivor_and_quantile():
    m = KotzRadial(1.0, 0.0, 1.0, 1.0)
    assert m.survivor(1.0) == pytest.approx(math.exp(-1))
    assert m.quantile(math.exp(-1)) == pytest.approx(1.0, rel=1e-12)


def test_chi2df_is_rayleigh():
    m = KotzRadial.chi2df()
    assert m.family_tag is FamilyTag.CHI2DF
    assert m.survivor(2.0) == pytest.approx(math.exp(-2.0))
    assert m.t(3.0) == pytest.approx(9.0)


def test_mda_ratio_for_gaussian_tail():
    # exact ratio: exp(-x - x^2 / (2 u^2))
    assert mda_ratio_diagnostic(KotzRadial.chi2df(), 20.0, 1.0) == pytest.approx(math.exp(-1 - 1 / 800), rel=1e-12)


def test_self_neglecting():
    assert self_neglecting_ratio(KotzRadial.chi2df(), 1e4, 3.0) == pytest.approx(1.0, abs=1e-7)


def test_atom_when_tail_function_stays_below_one():
    m = KotzRadial(2.0, 1.0, 1.0, 2.0)
    assert m.u0 == pytest.approx(math.sqrt(0.5))
    assert m.atom == pytest.approx(1 - 2 * math.sqrt(0.5) * math.exp(-0.5), rel=1e-12)
    q = m.quantile(0.5)
    assert m.survivor(q) == pytest.approx(0.5, rel=1e-12)


def test_invalid_parameters():
    with pytest.raises(ValueError):
        KotzRadial(1.0, 0.0, -1.0, 1.0)
    with pytest.raises(ValueError):
        KotzRadial(1.0, 0.0, 1.0, 1.0).quantile(1.5)
    with pytest.raises(ValueError):
        KotzRadial(1.0, 0.0, 1.0, 1.0).survivor(-1.0)


@given(K=st.floats(0.2, 5.0), N=st.floats(0.0, 3.0), r=st.floats(0.2, 3.0), kappa=st.floats(0.5, 3.0),
       p=st.floats(1e-12, 0.999))
@settings(max_examples=150, deadline=None)
def test_quantile_inverts_survivor(K, N, r, kappa, p):
    try:
        m = KotzRadial(K, N, r, kappa)
    except ValueError:
        return
    top = math.exp(m._log_tail(m.u0)) if m.u0 > 0 else 1.0
    if p >= top:
        assert m.quantile(p) == pytest.approx(m.u0)
        return
    q = m.quantile(p)
    assert m.survivor(q) == pytest.approx(p, rel=1e-9)


@given(u=st.floats(0.1, 50.0), v=st.floats(0.1, 50.0))
def test_survivor_nonincreasing(u, v):
    m = KotzRadial(1.5, 2.0, 0.7, 1.3)
    lo, hi = sorted((u, v))
    assert m.survivor(hi) <= m.survivor(lo)


@pytest.mark.parametrize("kappa", [1.0, 2.0, 3.0])
def test_second_order_bound_holds(kappa):
    m = KotzRadial(1.0, 0.0, 1.0, kappa)
    u_grid = np.linspace(m.second_order.u_min, m.second_order.u_min + 30, 40)
    assert second_order_violation(m, u_grid, np.linspace(0.01, 30, 80)) <= 1e-12


def test_custom_radial_quantile():
    m = CustomRadial(lambda u: math.exp(-u * u), lambda u: 2 * u, name="weibull2")
    assert m.quantile(0.25) == pytest.approx(math.sqrt(math.log(4)), rel=1e-10)


def test_sampling_matches_law():
    from scipy import stats

    m = KotzRadial(1.0, 0.0, 1.0, 2.0)
    x = m.sample(np.random.default_rng(3), 20000)
    assert stats.kstest(x, lambda u: 1 - np.exp(-u * u)).pvalue > 1e-3
