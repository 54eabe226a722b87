"""The team's coordination-scheduling problem.

    minimize  sum_S c_S (p_S - q_S)^2 + p_S fbar_S   over the probability simplex

The problem is separable and strictly convex, so the stationarity
conditions give p_S(nu) = max(0, q_S + (nu - fbar_S) / (2 c_S)) for the
simplex multiplier nu, and nu is pinned down by sum_S p_S(nu) = 1.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from coordscope import kernels
from coordscope.errors import InfeasibleInstanceError, InvalidParameterError, SolverFailure

log = logging.getLogger(__name__)

EMPTY_SET_WEIGHT = 1e-6
MAX_BRACKET_DOUBLINGS = 100
MAX_BISECTIONS = 400


@dataclass
class CoordinationInstance:
    family: list
    fbar: np.ndarray
    c: np.ndarray
    q: np.ndarray
    warnings: list = field(default_factory=list)

    def __post_init__(self):
        self.fbar = np.asarray(self.fbar, dtype=float)
        self.c = np.asarray(self.c, dtype=float)
        self.q = np.asarray(self.q, dtype=float)
        n = len(self.family)
        if n == 0:
            raise InfeasibleInstanceError("coordination instance has an empty family")
        if not (self.fbar.shape == self.c.shape == self.q.shape == (n,)):
            raise InvalidParameterError("fbar, c and q must each have one entry per family member")
        if not np.all(np.isfinite(self.fbar)):
            raise InvalidParameterError("fbar must be finite")
        if not np.all(self.c > 0) or not np.all(np.isfinite(self.c)):
            raise InvalidParameterError("coordination weights c must be positive and finite")
        if np.any(self.q < 0) or abs(self.q.sum() - 1.0) > 1e-12:
            raise InvalidParameterError("nominal distribution q must lie on the simplex")

    @property
    def size(self):
        return len(self.family)


@dataclass
class CoordinationResult:
    p: np.ndarray
    objective: float
    nu: float
    kkt_residual: float
    iterations: int


def objective(inst, p):
    return float(np.sum(inst.c * (p - inst.q) ** 2 + p * inst.fbar))


def kkt_residual(inst, p, nu):
    """Max violation over stationarity, dual feasibility, complementarity and primal feasibility."""
    grad = 2.0 * inst.c * (p - inst.q) + inst.fbar
    mu = np.maximum(0.0, grad - nu)
    stationarity = np.abs(grad - nu - mu)
    complementarity = np.abs(mu * p)
    return float(max(
        stationarity.max(),
        complementarity.max(),
        abs(p.sum() - 1.0),
        max(0.0, -p.min()),
    ))


def _c_for(S, rule):
    if len(S) == 0:
        return EMPTY_SET_WEIGHT
    if rule == "cardinality":
        return float(len(S))
    raise InvalidParameterError(f"unknown c rule {rule!r}")


def build_instance(atlas, c_rule="cardinality", q_rule="uniform"):
    """Coordination instance over the sets of ``atlas`` with at least one member.

    ``c_rule`` / ``q_rule`` may be a named rule or a vector over the full
    atlas family.
    """
    keep = [i for i, f in enumerate(atlas.fbar) if f is not None]
    if not keep:
        raise InfeasibleInstanceError("no time-set has a coordinated solution")
    family = [atlas.family[i] for i in keep]
    notes = []
    dropped = [atlas.family[i].label() for i, f in enumerate(atlas.fbar) if f is None]
    if dropped:
        msg = f"dropped {len(dropped)} time-set(s) with no coordinated solutions: {', '.join(dropped)}"
        notes.append(msg)
        log.warning(msg)

    if isinstance(c_rule, str):
        c = np.array([_c_for(S, c_rule) for S in family])
    else:
        c_full = np.asarray(c_rule, dtype=float)
        if c_full.shape != (len(atlas.family),):
            raise InvalidParameterError("custom c must have one entry per family member")
        c = c_full[keep]

    if isinstance(q_rule, str):
        if q_rule != "uniform":
            raise InvalidParameterError(f"unknown q rule {q_rule!r}")
        q = np.full(len(family), 1.0 / len(family))
    else:
        q_full = np.asarray(q_rule, dtype=float)
        if q_full.shape != (len(atlas.family),):
            raise InvalidParameterError("custom q must have one entry per family member")
        if dropped:
            # custom weights no longer sum to one over the surviving sets
            q = np.full(len(family), 1.0 / len(family))
            notes.append("custom q replaced by uniform over the surviving family")
        else:
            q = q_full
    return CoordinationInstance(family, np.array([atlas.fbar[i] for i in keep]), c, q, notes)


def _mass(inst, nu):
    return np.maximum(0.0, inst.q + (nu - inst.fbar) / (2.0 * inst.c))


def solve(inst, tol=1e-12):
    """Exact water-filling solution by bisection on the simplex multiplier."""
    fbar, c = inst.fbar, inst.c
    lo = fbar.min() - 2.0 * c.max()
    hi = fbar.max() + 2.0 * c.max()
    width = hi - lo
    for _ in range(MAX_BRACKET_DOUBLINGS):
        if _mass(inst, lo).sum() <= 1.0 <= _mass(inst, hi).sum():
            break
        width *= 2.0
        lo, hi = lo - width, hi + width
    else:
        raise SolverFailure("could not bracket the simplex multiplier")

    iters = 0
    while hi - lo > tol * (1.0 + abs(lo) + abs(hi)) and iters < MAX_BISECTIONS:
        mid = 0.5 * (lo + hi)
        if _mass(inst, mid).sum() < 1.0:
            lo = mid
        else:
            hi = mid
        iters += 1
    nu = 0.5 * (lo + hi)

    # closed form on the active set removes the bisection's residual slack
    active = _mass(inst, nu) > 0
    w = 1.0 / (2.0 * c[active])
    nu_exact = (1.0 - inst.q[active].sum() + np.sum(fbar[active] * w)) / w.sum()
    p_exact = _mass(inst, nu_exact)
    if np.array_equal(p_exact > 0, active) or kkt_residual(inst, p_exact, nu_exact) <= kkt_residual(inst, _mass(inst, nu), nu):
        nu = nu_exact
    p = _mass(inst, nu)
    return CoordinationResult(p, objective(inst, p), float(nu), kkt_residual(inst, p, nu), iters)


def solve_oracle(inst, steps=200_000, step_size=1e-3):
    """Projected gradient descent with exact simplex projection; a test oracle."""
    p, done = kernels.pgd_simplex(inst.fbar, inst.c, inst.q, inst.q.copy(), int(steps), float(step_size))
    p = np.asarray(p)
    grad = 2.0 * inst.c * (p - inst.q) + inst.fbar
    support = p > 0
    nu = float(grad[support].mean()) if support.any() else float(grad.min())
    return CoordinationResult(p, objective(inst, p), nu, kkt_residual(inst, p, nu), int(done))


def project_simplex(v):
    return np.asarray(kernels.project_simplex(np.asarray(v, dtype=float)))
