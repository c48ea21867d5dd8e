import math

import pytest

from polar_tails.angular import DirichletAngular, UniformAngular
from polar_tails.polar_exact import PolarModel
from polar_tails.radial import KotzRadial


def normal_sf(z: float) -> float:
    """Standard normal survivor from math.erfc, independent of scipy.stats."""
    return 0.5 * math.erfc(z / math.sqrt(2.0))


def normal_cdf(z: float) -> float:
    return 0.5 * math.erfc(-z / math.sqrt(2.0))


def gaussian_model(rho: float = 0.0) -> PolarModel:
    return PolarModel(KotzRadial.chi2df(), UniformAngular(), rho)


@pytest.fixture
def gaussian():
    return gaussian_model(0.0)


@pytest.fixture
def gaussian_half():
    return gaussian_model(0.5)


@pytest.fixture
def exp_uniform():
    return PolarModel(KotzRadial(1.0, 0.0, 1.0, 1.0), UniformAngular(), 0.0)


@pytest.fixture
def exp_dirichlet():
    return PolarModel(KotzRadial(1.0, 0.0, 1.0, 1.0), DirichletAngular(1.0, 1.0), 0.0)


_ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance():
    """Record and print one PASS/FAIL line for an acceptance criterion, then assert it."""

    def record(label: str, passed: bool, detail: str):
        line = f"{'PASS' if passed else 'FAIL'} [{label}] {detail}"
        _ACCEPTANCE_LINES.append(line)
        print(line)
        assert passed, line

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
