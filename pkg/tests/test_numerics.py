import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hexflow.curvature import curvature_K, laplacian
from hexflow.errors import LinearSolveFailure, NoConvergence, NotAdmissible
from hexflow.fixtures import dcs1_tetra
from hexflow.numerics import (
    SparseSymMatrix,
    cg_solve,
    composite_nodes,
    fd_jacobian,
    gauss_legendre,
    max_eigenvalue,
)


def _path_laplacian(n):
    """Negative definite Laplacian of a path with unit leaks at the ends."""
    a = np.zeros((n, n))
    for i in range(n - 1):
        a[i, i + 1] = a[i + 1, i] = 1.0
    np.fill_diagonal(a, -2.0)
    a[0, 0] = a[-1, -1] = -3.0
    return a


def test_sparse_round_trip():
    a = _path_laplacian(6)
    S = SparseSymMatrix.from_dense(a)
    assert np.array_equal(S.toarray(), a)
    x = np.arange(6.0)
    assert np.allclose(S @ x, a @ x, rtol=1e-15)
    assert np.array_equal(S.diagonal(), np.diag(a))
    assert S.norm_inf() == pytest.approx(np.abs(a).sum(axis=1).max())
    assert np.array_equal((-S).toarray(), -a)


def test_sparse_drops_small_offdiagonal():
    a = np.array([[1.0, 1e-20], [1e-20, 2.0]])
    S = SparseSymMatrix.from_dense(a, tol=1e-15)
    assert S.rows.tolist() == [0, 1]


def test_from_triplets_sums_duplicates():
    S = SparseSymMatrix.from_triplets(3, [0, 0, 1, 0], [0, 1, 2, 1], [1.0, 2.0, 3.0, 4.0])
    assert S.toarray()[0, 1] == 6.0
    assert S.toarray()[2, 1] == 3.0


def test_lower_triangle_rejected():
    with pytest.raises(ValueError):
        SparseSymMatrix(2, np.array([1]), np.array([0]), np.array([1.0]))


def test_cg_identity():
    b = np.array([1.0, -2.0, 3.5])
    assert np.allclose(cg_solve(SparseSymMatrix.from_dense(np.eye(3)), b), b, rtol=0, atol=1e-15)


def test_cg_tetra_matches_dense():
    fx = dcs1_tetra()
    L = laplacian(fx.cfg, fx.tri, fx.u_star)
    b = np.ones(4)
    x = cg_solve(-L, b)
    assert np.allclose(x, np.linalg.solve(-L.toarray(), b), rtol=1e-10, atol=0)


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 40), st.integers(0, 2**32 - 1))
def test_cg_random_spd(n, seed):
    rng = np.random.default_rng(seed)
    m = rng.normal(size=(n, n))
    a = m @ m.T + n * np.eye(n)
    b = rng.normal(size=n)
    x = cg_solve(SparseSymMatrix.from_dense(a), b, tol=1e-12)
    assert np.linalg.norm(a @ x - b) <= 1e-12 * np.linalg.norm(b) * (1 + 1e-9)


def test_cg_dense_input():
    a = -_path_laplacian(5)
    b = np.arange(1.0, 6.0)
    assert np.allclose(cg_solve(a, b), np.linalg.solve(a, b), rtol=1e-10)


def test_cg_zero_rhs():
    assert np.array_equal(cg_solve(np.eye(3), np.zeros(3)), np.zeros(3))


def test_cg_indefinite():
    a = np.array([[1.0, 2.0], [2.0, 1.0]])
    with pytest.raises(LinearSolveFailure):
        cg_solve(SparseSymMatrix.from_dense(a), np.array([1.0, -1.0]))


def test_cg_negative_definite_rejected():
    with pytest.raises(LinearSolveFailure, match="diagonal"):
        cg_solve(SparseSymMatrix.from_dense(_path_laplacian(4)), np.ones(4))


def test_max_eigenvalue_examples():
    assert max_eigenvalue(np.diag([-1.0, -2.0, -3.0])) == pytest.approx(-1.0, rel=1e-14)
    assert max_eigenvalue(SparseSymMatrix.from_dense(np.eye(4))) == pytest.approx(1.0, rel=1e-14)
    fx = dcs1_tetra()
    assert max_eigenvalue(laplacian(fx.cfg, fx.tri, fx.u_star)) < 0


@pytest.mark.parametrize("n", [40, 100])
def test_power_iteration_matches_dense(n):
    a = _path_laplacian(n)
    ref = np.linalg.eigvalsh(a)[-1]
    got = max_eigenvalue(SparseSymMatrix.from_dense(a))
    assert got == pytest.approx(ref, rel=1e-6)
    assert max_eigenvalue(a) == pytest.approx(ref, rel=1e-6)


def test_power_iteration_mixed_spectrum():
    rng = np.random.default_rng(2)
    q, _ = np.linalg.qr(rng.normal(size=(50, 50)))
    ev = np.linspace(-5.0, 2.0, 50)
    ev[-1] = 3.0
    a = (q * ev) @ q.T
    a = 0.5 * (a + a.T)
    assert max_eigenvalue(a) == pytest.approx(3.0, rel=1e-6)


def test_fd_identity():
    x = np.array([0.3, -1.2, 4.0])
    assert np.allclose(fd_jacobian(lambda v: v, x), np.eye(3), atol=1e-10)


def test_fd_laplacian_cross_check():
    fx = dcs1_tetra()
    fd = fd_jacobian(lambda v: curvature_K(fx.cfg, fx.tri, v), fx.u_star, 1e-5)
    L = laplacian(fx.cfg, fx.tri, fx.u_star).toarray()
    assert np.max(np.abs(fd - L)) / np.max(np.abs(L)) < 1e-6


def test_fd_surfaces_domain_errors():
    fx = dcs1_tetra()
    u = np.array([-1e-6, -1.0, -1.0, -1.0])
    with pytest.raises(NotAdmissible):
        fd_jacobian(lambda v: curvature_K(fx.cfg, fx.tri, v), u, 1e-5)


def test_gauss_legendre_exact():
    x, w = gauss_legendre(16)
    assert w.sum() == pytest.approx(1.0, rel=1e-15)
    assert (w * x**31).sum() == pytest.approx(1 / 32, rel=1e-13)
    xs, ws = composite_nodes(8)
    assert xs.size == 128 and np.all(np.diff(xs) > 0)
    assert (ws * np.sin(xs)).sum() == pytest.approx(1 - np.cos(1.0), rel=1e-15)


def test_power_iteration_gives_up():
    with pytest.raises(NoConvergence):
        max_eigenvalue(_path_laplacian(100), max_iter=10)
