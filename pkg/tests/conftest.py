import numpy as np
import pytest

from coordscope import (
    ProblemDims,
    TwoAgentProblem,
    make_dynamic_separation,
    make_quadratic_coupling,
    make_static_separation,
)

ACCEPTANCE_LINES = []


def bisect_root(h, lo, hi, tol=1e-15):
    """Plain bisection, kept separate from every library root finder."""
    flo = h(lo)
    assert flo * h(hi) < 0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if (h(mid) < 0) == (flo < 0):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def static_c_star(tau=0.5, gamma=1.0, rho=1.5):
    # dl/dx along y = -x
    def h(c):
        return 2 * tau * c - 4 * gamma * c / rho**2 * np.exp(-4 * c * c / rho**2)

    return bisect_root(h, 0.1, 3.0)


def difference_square():
    """f(x, y) = (x - y)^2 with T = 1: a line of stationary points x = y."""
    return TwoAgentProblem(
        ProblemDims(1),
        "difference_square",
        lambda z: (z[0] - z[1]) ** 2,
        lambda z: np.array([2 * (z[0] - z[1]), -2 * (z[0] - z[1])]),
        lambda z: np.array([[2.0, -2.0], [-2.0, 2.0]]),
    )


@pytest.fixture
def static():
    return make_static_separation(0.5, 1.0, 1.5)


@pytest.fixture
def quad():
    return make_quadratic_coupling()


@pytest.fixture
def dyn6():
    return make_dynamic_separation(6, 0.5, 1.0, 1.5)


BUILTIN_FACTORIES = {
    "static": lambda: make_static_separation(0.5, 1.0, 1.5),
    "quadratic": make_quadratic_coupling,
    "dynamic6": lambda: make_dynamic_separation(6),
    "dynamic10": lambda: make_dynamic_separation(10),
    "dynamic2_offdefault": lambda: make_dynamic_separation(2, 0.3, 2.0, 0.8),
}


@pytest.fixture(params=sorted(BUILTIN_FACTORIES))
def builtin(request):
    return BUILTIN_FACTORIES[request.param]()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE_LINES
