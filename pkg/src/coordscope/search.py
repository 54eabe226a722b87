"""Stationary-point discovery by randomly restarted, damped Newton root-finding.

Newton is applied to the system grad f = 0 with the gradient norm as the
line-search merit, so saddles are found as readily as minima.
"""

import os
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from coordscope.errors import InvalidParameterError

MAX_REGULARIZATION = 1e8
MAX_HALVINGS = 30
# a Newton step longer than this multiple of (1 + |z|_inf) counts as badly scaled
STEP_SCALE_LIMIT = 1e4
# merit stuck at a non-stationary local minimum of |grad f|: give up early
STALL_DECREASE = 1e-4
STALL_ITERATIONS = 5


@dataclass(frozen=True)
class SearchSettings:
    restarts: int = 500
    seed: int = 0
    box: float = 3.0
    grad_tol: float = 1e-10
    max_iter: int = 100
    reg_floor: float = 1e-8
    dedup_tol: float = 1e-4

    def __post_init__(self):
        for name in ("restarts", "max_iter"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or isinstance(v, bool) or v < 1:
                raise InvalidParameterError(f"{name} must be a positive integer, got {v!r}")
        if not isinstance(self.seed, (int, np.integer)) or not 0 <= self.seed < 2**64:
            raise InvalidParameterError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        for name in ("box", "grad_tol", "reg_floor", "dedup_tol"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0):
                raise InvalidParameterError(f"{name} must be strictly positive, got {v!r}")


@dataclass(frozen=True)
class StationaryPoint:
    point: np.ndarray
    cost: float
    residual: float
    iterations: int
    restart: int


@dataclass(frozen=True)
class Divergence:
    reason: str  # "max_iterations" | "non_finite" | "regularization" | "stalled"
    iterations: int
    restart: int


@dataclass
class SearchStats:
    restarts: int = 0
    converged: int = 0
    diverged: dict = field(default_factory=dict)
    iterations: dict = field(default_factory=dict)
    duplicates: int = 0
    distinct: int = 0

    def as_dict(self):
        return {
            "restarts": self.restarts,
            "converged": self.converged,
            "diverged": dict(sorted(self.diverged.items())),
            "iteration_histogram": {str(k): v for k, v in sorted(self.iterations.items())},
            "duplicates_merged": self.duplicates,
            "distinct": self.distinct,
        }


def _newton_step(H, g, lam, z):
    A = H if lam == 0.0 else H + lam * np.eye(H.shape[0])
    try:
        step = np.linalg.solve(A, -g)
    except np.linalg.LinAlgError:
        return None
    if not np.all(np.isfinite(step)):
        return None
    if np.max(np.abs(step)) > STEP_SCALE_LIMIT * (1.0 + np.max(np.abs(z))):
        return None
    return step


def newton_solve(problem, z0, s=SearchSettings(), restart=-1):
    """Find a root of the gradient starting from ``z0``.

    Returns a :class:`StationaryPoint`, or a :class:`Divergence` when the
    iteration limit is hit, an iterate goes non-finite, the regularization
    needed to make progress exceeds 1e8, or the merit stalls.
    """
    z = np.array(z0, dtype=float)
    if not np.all(np.isfinite(z)):
        raise ValueError("starting point must be finite")
    g = problem.gradient(z)
    stalled = 0
    for it in range(s.max_iter + 1):
        if not np.all(np.isfinite(g)):
            return Divergence("non_finite", it, restart)
        res = float(np.max(np.abs(g)))
        if res <= s.grad_tol:
            return StationaryPoint(z, problem.value(z), res, it, restart)
        if it == s.max_iter:
            break
        H = problem.hessian(z)
        merit = float(np.linalg.norm(g))
        lam = 0.0
        accepted = None
        while accepted is None:
            step = _newton_step(H, g, lam, z)
            if step is not None:
                alpha = 1.0
                for _ in range(MAX_HALVINGS + 1):
                    trial = z + alpha * step
                    g_trial = problem.gradient(trial)
                    if np.all(np.isfinite(g_trial)) and np.linalg.norm(g_trial) < merit:
                        accepted = (trial, g_trial)
                        break
                    alpha *= 0.5
            if accepted is None:
                lam = s.reg_floor if lam == 0.0 else lam * 10.0
                if lam > MAX_REGULARIZATION:
                    return Divergence("regularization", it, restart)
        z, g = accepted
        if not np.all(np.isfinite(z)):
            return Divergence("non_finite", it + 1, restart)
        if np.linalg.norm(g) > (1.0 - STALL_DECREASE) * merit:
            stalled += 1
            if stalled >= STALL_ITERATIONS and np.max(np.abs(g)) > s.grad_tol:
                return Divergence("stalled", it + 1, restart)
        else:
            stalled = 0
    return Divergence("max_iterations", s.max_iter, restart)


def restart_start(s, i, n):
    """Uniform start in [-box, box]^n for restart ``i``; independent of the restart count."""
    rng = np.random.default_rng(np.random.SeedSequence(entropy=int(s.seed), spawn_key=(int(i),)))
    return rng.uniform(-s.box, s.box, n)


def worker_count():
    raw = os.environ.get("COORDSCOPE_THREADS", "").strip()
    n = int(raw) if raw else 0
    if n < 0:
        raise InvalidParameterError(f"COORDSCOPE_THREADS must be >= 0, got {n}")
    return n if n > 0 else (os.cpu_count() or 1)


def run_restarts(problem, s=SearchSettings(), workers=None):
    """All restart outcomes, in restart-index order."""
    workers = worker_count() if workers is None else workers
    n = problem.dims.n

    def one(i):
        return newton_solve(problem, restart_start(s, i, n), s, restart=i)

    if workers <= 1:
        return [one(i) for i in range(s.restarts)]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(one, range(s.restarts), chunksize=max(1, s.restarts // (4 * workers))))


def deduplicate(points, tol):
    """Merge points within ``tol`` (inf-norm), keeping the smaller residual.

    Input order decides which cluster a point joins, so callers pass points
    in restart order.
    """
    reps = []
    merged = 0
    for p in points:
        for j, r in enumerate(reps):
            if np.max(np.abs(p.point - r.point)) <= tol:
                merged += 1
                if p.residual < r.residual:
                    reps[j] = p
                break
        else:
            reps.append(p)
    return reps, merged


def _sort_key(p):
    return (p.cost, tuple(p.point.tolist()))


def search_with_stats(problem, s=SearchSettings(), workers=None):
    outcomes = run_restarts(problem, s, workers)
    stats = SearchStats(restarts=s.restarts)
    accepted = []
    for out in outcomes:
        if isinstance(out, Divergence):
            stats.diverged[out.reason] = stats.diverged.get(out.reason, 0) + 1
            continue
        # re-verify with a fresh evaluation before accepting
        res = float(np.max(np.abs(problem.gradient(out.point))))
        if res > s.grad_tol:
            stats.diverged["post_check"] = stats.diverged.get("post_check", 0) + 1
            continue
        stats.converged += 1
        accepted.append(out)
    stats.iterations = dict(Counter(p.iterations for p in accepted))
    reps, stats.duplicates = deduplicate(accepted, s.dedup_tol)
    reps.sort(key=_sort_key)
    stats.distinct = len(reps)
    return reps, stats


def search(problem, s=SearchSettings(), workers=None):
    """Distinct stationary points found over ``s.restarts`` seeded restarts, sorted by cost."""
    return search_with_stats(problem, s, workers)[0]
