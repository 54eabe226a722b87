from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coordscope import (
    IndexMap,
    ProblemDims,
    SearchSettings,
    TimeSet,
    classify,
    enumerate_sets,
    is_pd,
    maximal_sets,
    search,
    subblock,
)
from coordscope.classifier import nesting_violations
from coordscope.errors import CapacityError, ContractError
from coordscope.search import StationaryPoint

from conftest import difference_square, static_c_star

I = TimeSet.interval


def test_enumerate_contiguous_T3():
    fam = enumerate_sets(3)
    assert fam == [I(1, 1), I(2, 2), I(3, 3), I(1, 2), I(2, 3), I(1, 3)]


@pytest.mark.parametrize("T", [1, 2, 6, 10])
def test_enumerate_contiguous_count(T):
    fam = enumerate_sets(T)
    assert len(fam) == T * (T + 1) // 2 and len(set(fam)) == len(fam)
    assert all(S.times == tuple(range(S.start, S.end + 1)) for S in fam)


def test_enumerate_power_set():
    fam = enumerate_sets(3, "power-set")
    assert len(fam) == 7
    assert [S.times for S in fam] == [(1,), (2,), (3,), (1, 2), (1, 3), (2, 3), (1, 2, 3)]
    assert len(enumerate_sets(5, "power-set")) == 31


def test_enumerate_include_empty():
    fam = enumerate_sets(3, include_empty=True)
    assert len(fam) == 7 and fam[-1] == TimeSet.empty()


def test_power_set_capacity():
    assert len(enumerate_sets(16, "power-set")) == 2**16 - 1
    with pytest.raises(CapacityError):
        enumerate_sets(17, "power-set")


def test_subblock_examples(quad):
    m = quad.index_map
    H = quad.hessian(np.zeros(6))
    B = subblock(H, TimeSet((1, 2)), m)
    assert B.shape == (4, 4)
    np.testing.assert_array_equal(np.diag(B), np.full(4, 2.0))
    np.testing.assert_array_equal(B[:2, 2:], np.full((2, 2), -0.8))
    np.testing.assert_array_equal(subblock(H, TimeSet((1, 2, 3)), m), H)
    H12 = np.arange(144.0).reshape(12, 12)
    np.testing.assert_array_equal(subblock(H12, I(4, 5), IndexMap(ProblemDims(6))), H12[np.ix_([3, 4, 9, 10], [3, 4, 9, 10])])


def test_is_pd_examples(quad):
    assert not is_pd(np.array([[0.1111, 0.8889], [0.8889, 0.1111]]))
    assert is_pd(np.array([[0.1111]]))
    H = quad.hessian(np.zeros(6))
    m = quad.index_map
    assert not is_pd(subblock(H, TimeSet((1, 2, 3)), m))
    for k in (1, 2):
        for S in combinations((1, 2, 3), k):
            assert is_pd(subblock(H, TimeSet(S), m))


def test_is_pd_rejects_semidefinite():
    assert not is_pd(np.array([[2.0, -2.0], [-2.0, 2.0]]))
    assert not is_pd(np.zeros((2, 2)))
    assert not is_pd(np.diag([1.0, 1e-12]))


def test_is_pd_contract():
    with pytest.raises(ContractError):
        is_pd(np.array([[1.0, 0.5], [0.0, 1.0]]))
    with pytest.raises(ContractError):
        is_pd(np.ones((2, 3)))


@settings(max_examples=100, deadline=None)
@given(n=st.integers(1, 7), seed=st.integers(0, 2**32 - 1), shift=st.floats(-2, 2))
def test_is_pd_matches_eigenvalue_rule(n, seed, shift):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(n, n))
    M = A @ A.T / n + shift * np.eye(n)
    lam = np.linalg.eigvalsh(M).min()
    eps = 1e-8 * (1 + np.abs(np.diag(M)).max())
    if abs(lam - eps) > 1e-10:
        assert is_pd(M) == (lam > eps)


def test_maximal_sets_examples():
    assert maximal_sets([I(1, 6), I(2, 5), I(4, 5)]) == [I(1, 6)]
    assert maximal_sets([I(1, 2), I(2, 3)]) == [I(1, 2), I(2, 3)]
    assert maximal_sets([]) == []
    assert maximal_sets([I(1, 1), I(1, 3), I(4, 4)]) == [I(1, 3), I(4, 4)]


def test_classify_static(static):
    pts = search(static, SearchSettings(restarts=500))
    atlas = classify(pts, static, enumerate_sets(1))
    assert len(atlas.records) == 3 and not atlas.discarded
    c = static_c_star()
    for rec in atlas.records:
        if np.max(np.abs(rec.stationary.point)) < 1e-8:
            assert rec.coordinated == [] and rec.pd_x and rec.pd_y and rec.min_eig < 0
        else:
            np.testing.assert_allclose(np.abs(rec.stationary.point), [c, c], atol=1e-8)
            assert rec.coordinated == [I(1, 1)] and rec.min_eig > 0
    assert atlas.members[0] == [0, 1]
    assert atlas.fbar[0] == pytest.approx(0.886, abs=1e-3)


def test_classify_quadratic_power_set(quad):
    pts = search(quad, SearchSettings(restarts=50))
    atlas = classify(pts, quad, enumerate_sets(3, "power-set"))
    (rec,) = atlas.records
    assert [S.times for S in rec.coordinated] == [(1,), (2,), (3,), (1, 2), (1, 3), (2, 3)]
    assert [S.times for S in rec.maximal] == [(1, 2), (1, 3), (2, 3)]
    assert [S.times for S in atlas.empty_sets] == [(1, 2, 3)]
    assert atlas.fbar[-1] is None


def test_full_set_implies_every_set(dyn6):
    pts = search(dyn6, SearchSettings(restarts=400))
    fam = enumerate_sets(6)
    atlas = classify(pts, dyn6, fam)
    full = [r for r in atlas.records if I(1, 6) in r.coordinated]
    assert full
    for r in full:
        assert r.coordinated == fam and r.maximal == [I(1, 6)]
    assert nesting_violations(atlas) == []
    # downward closure checked straight from the membership lists
    for i, S in enumerate(fam):
        for j, S2 in enumerate(fam):
            if S.issubset(S2):
                assert set(atlas.members[j]) <= set(atlas.members[i])


def test_discard_when_an_agent_block_is_indefinite():
    # f = -x^2 + y^2: stationary at the origin, agent one is at a maximum
    from coordscope import TwoAgentProblem

    p = TwoAgentProblem(
        ProblemDims(1), "saddle",
        lambda z: -z[0] ** 2 + z[1] ** 2,
        lambda z: np.array([-2 * z[0], 2 * z[1]]),
        lambda z: np.diag([-2.0, 2.0]),
    )
    sp = StationaryPoint(np.zeros(2), 0.0, 0.0, 0, 0)
    atlas = classify([sp], p, enumerate_sets(1))
    assert atlas.records == [] and atlas.discarded == [(sp, False, True)]
    assert atlas.fbar == [None]


def test_fbar_is_member_mean(dyn6):
    pts = search(dyn6, SearchSettings(restarts=400))
    atlas = classify(pts, dyn6, enumerate_sets(6))
    for m, f in zip(atlas.members, atlas.fbar):
        if m:
            costs = [atlas.records[r].cost for r in m]
            assert f * len(m) == pytest.approx(sum(costs), rel=4e-16, abs=0)


def test_classification_is_pure(dyn6):
    pts = search(dyn6, SearchSettings(restarts=200))
    fam = enumerate_sets(6)
    a = classify(pts, dyn6, fam)
    b = classify(pts, dyn6, fam)
    assert [r.membership for r in a.records] == [r.membership for r in b.records]
    assert a.fbar == b.fbar and a.members == b.members


def test_empty_set_is_vacuously_coordinated(dyn6):
    pts = search(dyn6, SearchSettings(restarts=200))
    atlas = classify(pts, dyn6, enumerate_sets(6, include_empty=True))
    assert len(atlas.members[-1]) == len(atlas.records)


def test_line_of_uncoordinated_solutions_has_constant_cost():
    p = difference_square()
    m = p.index_map
    ts = np.linspace(-3, 3, 100)
    pts, costs = [], []
    for t in ts:
        z = np.array([t, t])
        assert np.max(np.abs(p.gradient(z))) <= 1e-10
        H = p.hessian(z)
        assert is_pd(H[np.ix_(m.agent_indices(1), m.agent_indices(1))])
        assert is_pd(H[np.ix_(m.agent_indices(2), m.agent_indices(2))])
        costs.append(p.value(z))
        pts.append(StationaryPoint(z, p.value(z), 0.0, 0, 0))
    assert np.var(costs) <= 1e-12
    atlas = classify(pts, p, enumerate_sets(1))
    # every point is an uncoordinated solution; the full Hessian is only semidefinite
    assert len(atlas.records) == 100 and all(r.coordinated == [] for r in atlas.records)
