"""Central finite-difference oracles for problem derivatives."""

from dataclasses import dataclass

import numpy as np

from coordscope.errors import EvaluationError, InvalidParameterError


@dataclass(frozen=True)
class FdSettings:
    h0: float = 1e-5
    grad_rtol: float = 1e-5
    hess_rtol: float = 1e-4

    def __post_init__(self):
        for name in ("h0", "grad_rtol", "hess_rtol"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0):
                raise InvalidParameterError(f"{name} must be strictly positive, got {v!r}")


def _steps(z, s):
    return s.h0 * (1.0 + np.abs(z))


def fd_gradient(problem, z, s=FdSettings()):
    z = np.asarray(z, dtype=float)
    h = _steps(z, s)
    g = np.empty_like(z)
    for i in range(z.size):
        zp = z.copy()
        zm = z.copy()
        zp[i] += h[i]
        zm[i] -= h[i]
        fp = problem.value(zp)
        fm = problem.value(zm)
        if not (np.isfinite(fp) and np.isfinite(fm)):
            raise EvaluationError(f"non-finite objective while perturbing coordinate {i}", i)
        g[i] = (fp - fm) / (2.0 * h[i])
    return g


def fd_hessian(problem, z, s=FdSettings()):
    """Central differences of the analytic gradient, symmetrized."""
    z = np.asarray(z, dtype=float)
    h = _steps(z, s)
    H = np.empty((z.size, z.size))
    for i in range(z.size):
        zp = z.copy()
        zm = z.copy()
        zp[i] += h[i]
        zm[i] -= h[i]
        gp = problem.gradient(zp)
        gm = problem.gradient(zm)
        if not (np.all(np.isfinite(gp)) and np.all(np.isfinite(gm))):
            raise EvaluationError(f"non-finite gradient while perturbing coordinate {i}", i)
        H[:, i] = (gp - gm) / (2.0 * h[i])
    return 0.5 * (H + H.T)


def rel_error(a, b):
    """||a - b||_inf / (1 + ||a||_inf)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return float(np.max(np.abs(a - b)) / (1.0 + np.max(np.abs(a))))


@dataclass
class DerivativeCheck:
    problem: str
    points: int
    worst_grad_error: float
    worst_hess_error: float
    passed: bool
    # location of the worst failing entry, if any: (point index, "gradient"|"hessian", flat entry)
    failure: tuple | None = None

    def as_dict(self):
        return {
            "problem": self.problem,
            "points": self.points,
            "worst_grad_error": self.worst_grad_error,
            "worst_hess_error": self.worst_hess_error,
            "passed": self.passed,
            "failure": None if self.failure is None else list(self.failure),
        }


def check_problem(problem, points=20, seed=0, box=3.0, s=FdSettings()):
    """Compare analytic derivatives against finite differences at seeded random points."""
    if not isinstance(points, (int, np.integer)) or points < 1:
        raise InvalidParameterError(f"points must be a positive integer, got {points!r}")
    rng = np.random.default_rng(seed)
    worst_g = worst_h = 0.0
    failure = None
    for j in range(points):
        z = rng.uniform(-box, box, problem.dims.n)
        g = problem.gradient(z)
        H = problem.hessian(z)
        gfd = fd_gradient(problem, z, s)
        Hfd = fd_hessian(problem, z, s)
        eg = rel_error(g, gfd)
        eh = rel_error(H, Hfd)
        if eg > s.grad_rtol and failure is None:
            failure = (j, "gradient", int(np.argmax(np.abs(g - gfd))))
        if eh > s.hess_rtol and failure is None:
            failure = (j, "hessian", int(np.argmax(np.abs(H - Hfd))))
        worst_g = max(worst_g, eg)
        worst_h = max(worst_h, eh)
    return DerivativeCheck(problem.name, int(points), worst_g, worst_h, failure is None, failure)
