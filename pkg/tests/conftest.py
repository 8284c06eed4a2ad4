import numpy as np
import pytest

from aubalance import kernels
from aubalance.model import BalancingProblem, ObjectiveConfig


@pytest.fixture(params=sorted(kernels.BACKENDS))
def backend(request):
    return request.param


@pytest.fixture
def two_group_problem():
    # combinations [[1,0],[1,1]], n0 = [1, 3], lambda = 1
    return BalancingProblem([[1, 0], [1, 1]], [1, 3], ObjectiveConfig(1.0, 10.0))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in RESULTS:
        terminalreporter.write_line(line)
