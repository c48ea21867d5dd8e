import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import gaussian_model
from polar_tails import asymptotics as asy
from polar_tails import estimation as est
from polar_tails import sampling
from polar_tails.angular import DirichletAngular, UniformAngular
from polar_tails.errors import ConfigError, InsufficientDataError
from polar_tails.polar_exact import PolarModel
from polar_tails.radial import KotzRadial


def _batch(x, y):
    return sampling.SampleBatch(x=np.asarray(x, float), y=np.asarray(y, float), seed=None, model_descriptor="")


def test_rho_noiseless():
    x = np.linspace(1, 100, 1000)
    assert est.estimate_rho(_batch(x, 0.37 * x), 60) == pytest.approx(0.37)


def test_rho_preconditions():
    x = np.linspace(1, 100, 1000)
    with pytest.raises(InsufficientDataError):
        est.estimate_rho(_batch(x, x), 20)
    with pytest.raises(InsufficientDataError):
        est.estimate_rho(_batch(x, x), 200)


def test_rho_clipped_with_warning():
    x = np.linspace(1, 100, 1000)
    with pytest.warns(RuntimeWarning):
        assert abs(est.estimate_rho(_batch(x, 2 * x), 60)) < 1


@pytest.mark.parametrize("rho", [0.5, 0.0])
def test_rho_recovery(rho):
    b = sampling.sample_polar(gaussian_model(rho), 200000, 101)
    assert abs(est.estimate_rho(b, 2000) - rho) < 0.05


@pytest.mark.parametrize("gamma", [2.0, 1.0])
def test_w_recovery_weibull(gamma):
    rng = np.random.default_rng(8)
    x = (-np.log(rng.random(10**6))) ** (1 / gamma)
    fit = est.estimate_w_params(x, 0.1)
    assert abs(fit.gamma - gamma) < 0.1 * gamma
    assert fit.c == pytest.approx(1.0, rel=0.05)


def test_w_exact_survivor():
    u = np.linspace(1.0, 6.0, 40)
    fit = est.estimate_w_params_exact(u, np.exp(-0.7 * u**1.8))
    assert fit.gamma == pytest.approx(1.8, abs=1e-6)
    assert fit.c == pytest.approx(0.7, abs=1e-6)
    assert fit.w(2.0) == pytest.approx(0.7 * 1.8 * 2.0**0.8, rel=1e-6)


def test_w_preconditions():
    with pytest.raises(ConfigError):
        est.estimate_w_params(np.ones(10000), 0.5)
    with pytest.raises(InsufficientDataError):
        est.estimate_w_params(np.random.default_rng(0).random(500), 0.1)
    with pytest.raises(InsufficientDataError):
        est.estimate_w_params(np.full(10000, 3.0), 0.1)


def test_delta_uniform():
    theta = UniformAngular().sample(np.random.default_rng(2), 10**6)
    assert abs(est.estimate_delta(theta).delta) < 0.1


def test_delta_dirichlet():
    theta = DirichletAngular(1.0, 1.0).sample(np.random.default_rng(3), 10**6)
    d = est.estimate_delta(theta)
    assert 0.35 <= d.delta <= 0.65 and d.source == "estimated"


def test_delta_provided_and_preconditions():
    d = est.estimate_delta(provided=0.25)
    assert d.delta == 0.25 and d.source == "provided"
    with pytest.raises(InsufficientDataError):
        est.estimate_delta(np.linspace(-1, 1, 1000))
    with pytest.raises(ConfigError):
        est.estimate_delta()


def test_angles_reconstructed_from_pairs():
    m = PolarModel(KotzRadial(1.0, 0.0, 1.0, 1.0), DirichletAngular(1.0, 1.0), 0.4)
    b = sampling.sample_polar(m, 1000, 6, keep_angles=True)
    assert np.allclose(est.angles_from_pairs(b.x, b.y, 0.4), b.angles, atol=1e-12)


def _true_report(rho=0.5):
    # chi-squared radius: -log S(u) = u^2/2, so c = 1/2 and gamma = 2
    return est.EstimatorReport(rho_hat=rho, c_hat=0.5, gamma_hat=2.0, delta_hat=0.0, delta_source="provided",
                               k_used=0)


def test_psi_hat_plug_in_exact():
    r = _true_report()
    law = asy.LimitLaw.gaussian()
    x, y = 4.0, 2.7
    w = 4.0
    expected = law.cdf((y - 0.5 * x) / math.sqrt(0.75 * x / w))
    assert est.psi_hat(r, x, y, 1) == expected


def test_psi_hat_variants_differ_by_shift():
    r = _true_report()
    x, y = 5.0, 3.1
    w = float(r.w_hat(x))
    scale = math.sqrt(0.75 * x / w)
    assert est.psi_hat(r, x, y, 2) == pytest.approx(est.psi_hat(r, x, y - 0.5 / w, 1), abs=1e-15)
    law = r.law()
    assert est.psi_hat(r, x, y, 2) == pytest.approx(law.cdf((y - 0.5 * x) / scale - 0.5 / w / scale), abs=1e-15)


@given(y1=st.floats(-20, 20), y2=st.floats(-20, 20))
def test_psi_hat_monotone(y1, y2):
    r = _true_report()
    lo, hi = sorted((y1, y2))
    for v in (1, 2):
        assert est.psi_hat(r, 5.0, lo, v) <= est.psi_hat(r, 5.0, hi, v)


def test_psi_hat_warns_small_threshold():
    with pytest.warns(RuntimeWarning):
        est.psi_hat(_true_report(), 1.0, 0.0)


def test_psi_hat_against_exact_conditional():
    from polar_tails import polar_exact as pe

    m = gaussian_model(0.5)
    b = sampling.sample_polar(m, 10**6, 55)
    report = est.estimate(b, k=5000, tail_fraction=0.1)
    x = float(np.quantile(b.x, 0.995))
    ys = np.linspace(x * 0.5 - 3, x * 0.5 + 3, 41)
    exact = pe.conditional_cdf_grid(m, x, ys)
    with pytest.warns(RuntimeWarning):
        err = max(abs(est.psi_hat(report, x, y, 1) - e) for y, e in zip(ys, exact))
    assert err < 0.08


def test_report_roundtrip():
    r = _true_report(0.123)
    r.diagnostics["n"] = 10
    back = est.EstimatorReport.from_text(r.to_text())
    assert back.rho_hat == 0.123 and back.gamma_hat == 2.0 and back.diagnostics["n"] == 10
    assert "rho_hat=0.123" in r.to_text()
