import numpy as np
import pytest

from coordscope import IndexMap, ProblemDims, make_dynamic_separation, make_static_separation
from coordscope.calculus import fd_gradient, fd_hessian, rel_error
from coordscope.errors import InvalidParameterError
from coordscope.problems import make_problem, positions, quadratic_coupling_matrix

from conftest import static_c_star


def test_dims():
    d = ProblemDims(3, 2, 1)
    assert d.n == 9 and d.n_x == 6
    with pytest.raises(InvalidParameterError):
        ProblemDims(0)
    with pytest.raises(InvalidParameterError):
        ProblemDims(2, dx=0)


@pytest.mark.parametrize(
    "dims, agent, t, expected",
    [((6, 1, 1), 1, 4, 3), ((6, 1, 1), 2, 4, 9), ((3, 2, 1), 2, 1, 6)],
)
def test_flat_index_examples(dims, agent, t, expected):
    assert IndexMap(ProblemDims(*dims)).flat_index(agent, t) == expected


@pytest.mark.parametrize("dims", [(1, 1, 1), (4, 2, 3), (6, 1, 1), (3, 3, 1)])
def test_index_map_is_bijective(dims):
    d = ProblemDims(*dims)
    m = IndexMap(d)
    idx = [m.flat_index(1, t, k) for t in range(1, d.T + 1) for k in range(d.dx)]
    assert sorted(idx) == list(range(d.n_x))
    idx += [m.flat_index(2, t, k) for t in range(1, d.T + 1) for k in range(d.dy)]
    assert sorted(idx) == list(range(d.n))


@pytest.mark.parametrize("agent, t, k", [(3, 1, 0), (1, 3, 0), (1, 0, 0), (1, 1, 1), (2, 1, 5)])
def test_flat_index_out_of_range(agent, t, k):
    m = IndexMap(ProblemDims(2, 1, 1))
    with pytest.raises(IndexError):
        m.flat_index(agent, t, k)


def test_static_separation_values(static):
    assert static.value(np.zeros(2)) == 1.0
    np.testing.assert_array_equal(static.gradient(np.zeros(2)), [0.0, 0.0])
    c = static_c_star()
    assert c == pytest.approx(0.5689, abs=1e-4)
    # closed form of the same root: exp(-4c^2/rho^2) = tau rho^2 / (2 gamma)
    assert c == pytest.approx(0.75 * np.sqrt(-np.log(0.5625)), abs=1e-12)
    assert static.value(np.array([c, -c])) == pytest.approx(0.886, abs=1e-3)


def test_static_hessian_at_origin(static):
    H = static.hessian(np.zeros(2))
    expected = np.array([[1 - 2 / 1.5**2, 2 / 1.5**2], [2 / 1.5**2, 1 - 2 / 1.5**2]])
    np.testing.assert_allclose(H, expected, atol=1e-12)
    np.testing.assert_allclose(H, [[0.1111, 0.8889], [0.8889, 0.1111]], atol=1e-4)
    assert np.all(np.diag(H) > 0)
    assert np.linalg.eigvalsh(H).min() < 0


@pytest.mark.parametrize("bad", [dict(tau=0), dict(gamma=-1), dict(rho=0.0), dict(tau=float("nan"))])
def test_static_rejects_nonpositive(bad):
    with pytest.raises(InvalidParameterError):
        make_static_separation(**{"tau": 0.5, "gamma": 1.0, "rho": 1.5, **bad})


def test_dynamic_rejects_bad_params():
    with pytest.raises(InvalidParameterError):
        make_dynamic_separation(6, tau=-0.5)
    with pytest.raises(InvalidParameterError):
        make_dynamic_separation(0)


def test_quadratic_coupling(quad):
    z0 = np.zeros(6)
    assert quad.value(z0) == 0.0
    np.testing.assert_array_equal(quad.gradient(z0), np.zeros(6))
    H = quad.hessian(z0)
    np.testing.assert_array_equal(np.diag(H), np.full(6, 2.0))
    np.testing.assert_array_equal(H[:3, 3:], np.full((3, 3), -0.8))
    np.testing.assert_array_equal(H[:3, :3] - np.diag(np.diag(H[:3, :3])), np.zeros((3, 3)))
    e1 = np.eye(6)[0]
    assert quad.value(e1) == 1.0
    np.testing.assert_array_equal(quad.hessian(np.arange(6.0)), H)
    np.testing.assert_array_equal(quadratic_coupling_matrix() * 2, H)


def test_dynamic_at_zero(dyn6):
    assert dyn6.value(np.zeros(12)) == pytest.approx(7.0, abs=1e-15)


def test_positions():
    assert positions([1.0, 2.0])[2] == 3.0
    np.testing.assert_array_equal(positions([1.0, 2.0]), [0.0, 1.0, 3.0])


def test_dynamic_value_matches_direct_simulation():
    T, tau, gamma, rho = 5, 0.4, 1.3, 1.1
    p = make_dynamic_separation(T, tau, gamma, rho)
    rng = np.random.default_rng(3)
    for _ in range(10):
        z = rng.normal(size=2 * T)
        z1, z2 = positions(z[:T]), positions(z[T:])
        direct = tau * np.sum(z**2) + np.sum(gamma * np.exp(-(((z1 - z2) / rho) ** 2)))
        assert p.value(z) == pytest.approx(direct, rel=1e-13)


def test_dynamic_gradient_matches_fd_at_20_points(dyn6):
    rng = np.random.default_rng(20)
    for _ in range(20):
        z = rng.uniform(-3, 3, 12)
        assert rel_error(dyn6.gradient(z), fd_gradient(dyn6, z)) <= 1e-5


def test_derivatives_match_fd_at_100_points(builtin):
    rng = np.random.default_rng(100)
    for _ in range(100):
        z = rng.uniform(-3, 3, builtin.dims.n)
        assert rel_error(builtin.gradient(z), fd_gradient(builtin, z)) <= 1e-5
        assert rel_error(builtin.hessian(z), fd_hessian(builtin, z)) <= 1e-4


def test_hessian_exactly_symmetric(builtin):
    rng = np.random.default_rng(1)
    for _ in range(10):
        H = builtin.hessian(rng.uniform(-3, 3, builtin.dims.n))
        assert np.max(np.abs(H - H.T)) == 0.0


def test_evaluators_are_pure(builtin):
    z = np.random.default_rng(2).uniform(-2, 2, builtin.dims.n)
    before = z.copy()
    assert builtin.value(z) == builtin.value(z)
    np.testing.assert_array_equal(builtin.gradient(z), builtin.gradient(z))
    np.testing.assert_array_equal(builtin.hessian(z), builtin.hessian(z))
    np.testing.assert_array_equal(z, before)


def test_shape_check(static):
    with pytest.raises(ValueError):
        static.value(np.zeros(3))


def test_make_problem_registry():
    assert make_problem("dynamic_separation", T=3).dims.n == 6
    with pytest.raises(InvalidParameterError):
        make_problem("nope")
