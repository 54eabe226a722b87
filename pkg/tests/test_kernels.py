"""The numba and pure-numpy kernel backends must agree."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from coordscope import kernels
from coordscope.kernels import _numpy as knp

knb = pytest.importorskip("coordscope.kernels._numba")

finite = st.floats(-4, 4, allow_nan=False)


def test_backend_flag_is_resolved():
    assert kernels.BACKEND in ("numba", "numpy")


@settings(max_examples=60, deadline=None)
@given(T=st.integers(1, 12), seed=st.integers(0, 2**32 - 1))
def test_dynamic_kernels_agree(T, seed):
    rng = np.random.default_rng(seed)
    u1, u2 = rng.uniform(-3, 3, T), rng.uniform(-3, 3, T)
    args = (0.5, 1.0, 1.5)
    assert knb.dynamic_value(u1, u2, *args) == pytest.approx(knp.dynamic_value(u1, u2, *args), rel=1e-13)
    np.testing.assert_allclose(knb.dynamic_gradient(u1, u2, *args), knp.dynamic_gradient(u1, u2, *args), rtol=1e-12, atol=1e-13)
    np.testing.assert_allclose(knb.dynamic_hessian(u1, u2, *args), knp.dynamic_hessian(u1, u2, *args), rtol=1e-12, atol=1e-13)


def _random_sym(rng, n):
    A = rng.normal(size=(n, n))
    return A + A.T


@settings(max_examples=60, deadline=None)
@given(n=st.integers(1, 8), seed=st.integers(0, 2**32 - 1), shift=st.floats(-3, 3))
def test_pd_flags_agree_and_match_eigenvalues(n, seed, shift):
    rng = np.random.default_rng(seed)
    H = _random_sym(rng, n) + shift * n * np.eye(n)
    sets = [np.sort(rng.choice(n, size=k, replace=False)) for k in range(1, n + 1)]
    indices = np.concatenate(sets).astype(np.int64)
    offsets = np.concatenate([[0], np.cumsum([len(s) for s in sets])]).astype(np.int64)
    a = knb.subblock_pd_flags(H, indices, offsets, 1e-8)
    b = knp.subblock_pd_flags(H, indices, offsets, 1e-8)
    for s, fa, fb in zip(sets, a, b):
        sub = H[np.ix_(s, s)]
        lam = np.linalg.eigvalsh(sub).min()
        eps = 1e-8 * (1 + np.abs(np.diag(sub)).max())
        if abs(lam - eps) > 1e-9:
            assert fa == fb == (lam > eps)


def test_pd_flags_empty_index_set_is_vacuous():
    H = -np.eye(2)
    indices = np.array([0], dtype=np.int64)
    offsets = np.array([0, 0, 1], dtype=np.int64)
    for k in (knb, knp):
        assert k.subblock_pd_flags(H, indices, offsets, 1e-8).tolist() == [True, False]


@settings(max_examples=100, deadline=None)
@given(arrays(np.float64, st.integers(1, 40), elements=finite))
def test_simplex_projection(v):
    a = knb.project_simplex(v)
    b = knp.project_simplex(v)
    np.testing.assert_allclose(a, b, atol=1e-12)
    assert np.all(a >= 0) and abs(a.sum() - 1) <= 1e-10
    # optimality: no simplex vertex is closer to v than the projection along that direction
    for i in range(len(v)):
        e = np.zeros(len(v))
        e[i] = 1
        assert np.dot(v - a, e - a) <= 1e-9


def test_pgd_kernels_agree():
    rng = np.random.default_rng(0)
    n = 7
    fbar, c = rng.uniform(0, 3, n), rng.integers(1, 5, n).astype(float)
    q = np.full(n, 1 / n)
    pa, ia = knb.pgd_simplex(fbar, c, q, q.copy(), 5000, 1e-3)
    pb, ib = knp.pgd_simplex(fbar, c, q, q.copy(), 5000, 1e-3)
    np.testing.assert_allclose(pa, pb, atol=1e-12)
