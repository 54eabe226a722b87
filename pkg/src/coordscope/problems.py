"""Two-agent problem abstraction and the built-in problems.

Joint points are stacked agent-major: all of agent one's steps x_1..x_T,
then all of agent two's steps y_1..y_T. Within an agent the layout is
time-major, and within a step it follows coordinate order.
"""

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from coordscope import kernels
from coordscope.errors import InvalidParameterError


@dataclass(frozen=True)
class ProblemDims:
    T: int
    dx: int = 1
    dy: int = 1

    def __post_init__(self):
        for name in ("T", "dx", "dy"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or isinstance(v, bool) or v < 1:
                raise InvalidParameterError(f"{name} must be a positive integer, got {v!r}")

    @property
    def n(self) -> int:
        return self.T * (self.dx + self.dy)

    @property
    def n_x(self) -> int:
        return self.T * self.dx


@dataclass(frozen=True)
class IndexMap:
    dims: ProblemDims

    def flat_index(self, agent: int, t: int, k: int = 0) -> int:
        d = self.dims
        if agent not in (1, 2):
            raise IndexError(f"agent must be 1 or 2, got {agent!r}")
        width = d.dx if agent == 1 else d.dy
        if not 1 <= t <= d.T:
            raise IndexError(f"time-step {t} outside 1..{d.T}")
        if not 0 <= k < width:
            raise IndexError(f"coordinate {k} outside 0..{width - 1} for agent {agent}")
        if agent == 1:
            return (t - 1) * d.dx + k
        return d.n_x + (t - 1) * d.dy + k

    def agent_indices(self, agent: int) -> np.ndarray:
        d = self.dims
        if agent == 1:
            return np.arange(0, d.n_x)
        if agent == 2:
            return np.arange(d.n_x, d.n)
        raise IndexError(f"agent must be 1 or 2, got {agent!r}")

    def time_indices(self, times) -> np.ndarray:
        """Flat indices of x_t then y_t for each t in ``times`` (agent-major)."""
        d = self.dims
        times = sorted(times)
        xs = [self.flat_index(1, t, k) for t in times for k in range(d.dx)]
        ys = [self.flat_index(2, t, k) for t in times for k in range(d.dy)]
        return np.array(xs + ys, dtype=np.int64)


def flat_index(imap: IndexMap, agent: int, t: int, k: int = 0) -> int:
    return imap.flat_index(agent, t, k)


@dataclass(frozen=True)
class TwoAgentProblem:
    """A twice-differentiable common objective over both agents' decisions.

    The evaluators take a flat joint point of length ``dims.n``. They must
    be pure, since the search calls them from several worker threads.
    """

    dims: ProblemDims
    name: str
    value_fn: Callable[[np.ndarray], float]
    gradient_fn: Callable[[np.ndarray], np.ndarray]
    hessian_fn: Callable[[np.ndarray], np.ndarray]
    params: dict = field(default_factory=dict)

    @property
    def index_map(self) -> IndexMap:
        return IndexMap(self.dims)

    def _check(self, z):
        z = np.asarray(z, dtype=float)
        if z.shape != (self.dims.n,):
            raise ValueError(f"expected a joint point of shape ({self.dims.n},), got {z.shape}")
        return z

    def value(self, z) -> float:
        return float(self.value_fn(self._check(z)))

    def gradient(self, z) -> np.ndarray:
        return np.asarray(self.gradient_fn(self._check(z)), dtype=float)

    def hessian(self, z) -> np.ndarray:
        H = np.asarray(self.hessian_fn(self._check(z)), dtype=float)
        return 0.5 * (H + H.T)


def _positive(**params):
    for name, v in params.items():
        if not (np.isfinite(v) and v > 0):
            raise InvalidParameterError(f"{name} must be a positive finite number, got {v!r}")
    return {k: float(v) for k, v in params.items()}


def make_static_separation(tau=0.5, gamma=1.0, rho=1.5) -> TwoAgentProblem:
    """Two robots on a line trading control effort against proximity.

    l(x, y) = tau (x^2 + y^2) + gamma exp(-((x - y) / rho)^2), with T = 1.
    """
    p = _positive(tau=tau, gamma=gamma, rho=rho)
    tau, gamma, rho = p["tau"], p["gamma"], p["rho"]
    inv = 1.0 / rho**2

    def value(z):
        x, y = z
        return tau * (x * x + y * y) + gamma * np.exp(-((x - y) ** 2) * inv)

    def gradient(z):
        x, y = z
        e = gamma * np.exp(-((x - y) ** 2) * inv)
        gp = -2.0 * (x - y) * inv * e
        return np.array([2.0 * tau * x + gp, 2.0 * tau * y - gp])

    def hessian(z):
        x, y = z
        d = x - y
        e = gamma * np.exp(-(d * d) * inv)
        gpp = (4.0 * d * d * inv * inv - 2.0 * inv) * e
        return np.array([[2.0 * tau + gpp, -gpp], [-gpp, 2.0 * tau + gpp]])

    return TwoAgentProblem(ProblemDims(1), "static_separation", value, gradient, hessian, p)


def quadratic_coupling_matrix() -> np.ndarray:
    """Unit diagonal with every cross-agent entry -2/5, over T = 3."""
    Q = np.eye(6)
    Q[:3, 3:] = -0.4
    Q[3:, :3] = -0.4
    return Q


def make_quadratic_coupling() -> TwoAgentProblem:
    Q = quadratic_coupling_matrix()
    H = 2.0 * Q

    def value(z):
        return z @ Q @ z

    def gradient(z):
        return H @ z

    def hessian(z):
        return H.copy()

    return TwoAgentProblem(ProblemDims(3), "quadratic_coupling", value, gradient, hessian)


def make_dynamic_separation(T=6, tau=0.5, gamma=1.0, rho=1.5) -> TwoAgentProblem:
    """Single-integrator robots with positions substituted out.

    Decision variables are the controls u_t; positions are z_t = sum_{k<t} u_k
    with z_1 = 0, and the proximity penalty runs over t = 1..T+1.
    """
    dims = ProblemDims(T)
    p = _positive(tau=tau, gamma=gamma, rho=rho)
    tau, gamma, rho = p["tau"], p["gamma"], p["rho"]

    def value(z):
        return kernels.dynamic_value(z[:T], z[T:], tau, gamma, rho)

    def gradient(z):
        return kernels.dynamic_gradient(z[:T], z[T:], tau, gamma, rho)

    def hessian(z):
        return kernels.dynamic_hessian(z[:T], z[T:], tau, gamma, rho)

    params = {"T": T, **p}
    return TwoAgentProblem(dims, "dynamic_separation", value, gradient, hessian, params)


def positions(controls) -> np.ndarray:
    """Positions z_1..z_{T+1} reached from z_1 = 0 under single-integrator controls."""
    controls = np.asarray(controls, dtype=float)
    return np.concatenate([[0.0], np.cumsum(controls)])


BUILTINS = {
    "static_separation": make_static_separation,
    "quadratic_coupling": make_quadratic_coupling,
    "dynamic_separation": make_dynamic_separation,
}


def make_problem(name: str, **params) -> TwoAgentProblem:
    try:
        factory = BUILTINS[name]
    except KeyError:
        raise InvalidParameterError(
            f"unknown problem {name!r}; choose from {sorted(BUILTINS)}"
        ) from None
    return factory(**params)
