import numpy as np
import pytest

from adslf.grid import Domain
from adslf.harmonic import dalembert_solve
from adslf.presets import cauchy_preset
from adslf.surfaces import reconstruct_case1


@pytest.fixture(scope="session")
def coarse_t():
    return Domain(-0.5, 0.5, 2e-2).t


@pytest.fixture(scope="session")
def skew_nu(coarse_t):
    return dalembert_solve(cauchy_preset("skew-immersion", coarse_t))


@pytest.fixture(scope="session")
def skew_surface(skew_nu):
    return reconstruct_case1(skew_nu, 2.0)


@pytest.fixture
def rng():
    return np.random.default_rng(7)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
