"""Second-order classification of stationary points by coordinated time-sets.

A stationary point is kept only if both agents' full diagonal Hessian blocks
are positive definite (each agent is unilaterally optimal). It is then
coordinated on a time-set S when the joint Hessian restricted to both agents'
variables at times in S is positive definite as well.
"""

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from coordscope import kernels
from coordscope.errors import CapacityError, ContractError, InvalidParameterError

POWER_SET_MAX_T = 16
DEFAULT_EPS_REL = 1e-8


@dataclass(frozen=True, order=True)
class TimeSet:
    times: tuple
    kind: str = "subset"  # "interval" | "subset" | "empty"

    @classmethod
    def interval(cls, start, end):
        return cls(tuple(range(start, end + 1)), "interval")

    @classmethod
    def empty(cls):
        return cls((), "empty")

    def __len__(self):
        return len(self.times)

    @property
    def start(self):
        return self.times[0] if self.times else None

    @property
    def end(self):
        return self.times[-1] if self.times else None

    def issubset(self, other):
        return set(self.times) <= set(other.times)

    def label(self):
        if self.kind == "interval":
            return f"[{self.start},{self.end}]"
        return "{" + ",".join(map(str, self.times)) + "}"

    def as_dict(self):
        d = {"kind": self.kind, "times": list(self.times)}
        if self.kind == "interval":
            d["start"], d["end"] = self.start, self.end
        return d


def enumerate_sets(T, mode="contiguous", include_empty=False):
    """The time-set family: all intervals, or all non-empty subsets.

    Ordered by cardinality, then lexicographically; the empty set (if
    requested) comes last.
    """
    if not isinstance(T, (int, np.integer)) or T < 1:
        raise InvalidParameterError(f"T must be a positive integer, got {T!r}")
    if mode == "contiguous":
        family = [TimeSet.interval(a, a + L - 1) for L in range(1, T + 1) for a in range(1, T - L + 2)]
    elif mode == "power-set":
        if T > POWER_SET_MAX_T:
            raise CapacityError(f"power-set family needs T <= {POWER_SET_MAX_T}, got T={T}")
        family = [TimeSet(c) for L in range(1, T + 1) for c in combinations(range(1, T + 1), L)]
    else:
        raise InvalidParameterError(f"unknown family mode {mode!r}")
    if include_empty:
        family.append(TimeSet.empty())
    return family


def subblock(H, S, imap):
    idx = imap.time_indices(S.times)
    return H[np.ix_(idx, idx)]


def _check_symmetric(M):
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ContractError(f"expected a square matrix, got shape {M.shape}")
    scale = 1.0 + (np.max(np.abs(M)) if M.size else 0.0)
    if M.size and np.max(np.abs(M - M.T)) > 1e-12 * scale:
        raise ContractError("matrix is not symmetric")
    return M


def is_pd(M, eps_rel=DEFAULT_EPS_REL):
    """True iff min eigenvalue of ``M`` exceeds eps_rel * (1 + max |diag|).

    Semidefinite and borderline matrices are rejected.
    """
    M = _check_symmetric(M)
    n = M.shape[0]
    if n == 0:
        return True
    flags = kernels.subblock_pd_flags(M, np.arange(n, dtype=np.int64), np.array([0, n], dtype=np.int64), float(eps_rel))
    return bool(flags[0])


def maximal_sets(coordinated):
    """Drop every set strictly contained in another; largest first."""
    out = []
    for S in coordinated:
        if not any(len(S2) > len(S) and S.issubset(S2) for S2 in coordinated):
            if S not in out:
                out.append(S)
    return sorted(out, key=lambda S: (-len(S), S.times))


@dataclass
class SolutionRecord:
    stationary: object  # StationaryPoint
    pd_x: bool
    pd_y: bool
    membership: int  # bit i set <=> coordinated on family[i]
    coordinated: list
    maximal: list
    min_eig: float

    @property
    def cost(self):
        return self.stationary.cost


@dataclass
class SolutionAtlas:
    problem: str
    params: dict
    family: list
    records: list
    members: list  # members[i] = record indices in SOL_{family[i]}
    fbar: list  # mean member cost per family entry, None when SOL_S is empty
    discarded: list = field(default_factory=list)  # (StationaryPoint, pd_x, pd_y)

    @property
    def empty_sets(self):
        return [S for S, m in zip(self.family, self.members) if not m]


def _family_index_arrays(family, imap):
    chunks = [imap.time_indices(S.times) for S in family]
    offsets = np.zeros(len(chunks) + 1, dtype=np.int64)
    offsets[1:] = np.cumsum([len(c) for c in chunks])
    indices = np.concatenate(chunks).astype(np.int64) if chunks else np.zeros(0, dtype=np.int64)
    return indices, offsets


def classify(points, problem, family, eps_rel=DEFAULT_EPS_REL):
    imap = problem.index_map
    indices, offsets = _family_index_arrays(family, imap)
    agent_idx = np.concatenate([imap.agent_indices(1), imap.agent_indices(2)]).astype(np.int64)
    agent_off = np.array([0, problem.dims.n_x, problem.dims.n], dtype=np.int64)

    records, discarded = [], []
    for sp in points:
        H = problem.hessian(sp.point)
        pd_x, pd_y = (bool(b) for b in kernels.subblock_pd_flags(H, agent_idx, agent_off, eps_rel))
        if not (pd_x and pd_y):
            discarded.append((sp, pd_x, pd_y))
            continue
        flags = kernels.subblock_pd_flags(H, indices, offsets, eps_rel)
        mask = 0
        coordinated = []
        for i, (S, ok) in enumerate(zip(family, flags)):
            # the empty set is vacuously coordinated
            if ok or len(S) == 0:
                mask |= 1 << i
                coordinated.append(S)
        min_eig = float(np.linalg.eigvalsh(H)[0])
        records.append(SolutionRecord(sp, pd_x, pd_y, mask, coordinated, maximal_sets(coordinated), min_eig))

    members = [[r for r, rec in enumerate(records) if rec.membership >> i & 1] for i in range(len(family))]
    fbar = [
        float(np.mean([records[r].cost for r in m])) if m else None
        for m in members
    ]
    return SolutionAtlas(problem.name, dict(problem.params), list(family), records, members, fbar, discarded)


def nesting_violations(atlas):
    """Pairs S ⊆ S' where some record is in SOL_{S'} but not in SOL_S."""
    fam = atlas.family
    bad = []
    for rec_i, rec in enumerate(atlas.records):
        for i, S in enumerate(fam):
            if rec.membership >> i & 1:
                continue
            for j, S2 in enumerate(fam):
                if rec.membership >> j & 1 and S.issubset(S2):
                    bad.append((rec_i, S, S2))
    return bad
