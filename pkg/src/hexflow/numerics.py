"""Small numerical kernels shared by the solvers.

The matrices involved are tiny (one row per boundary component), so every
sparse routine here has a dense counterpart that the tests use as an oracle.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from hexflow.errors import LinearSolveFailure, NoConvergence

DENSE_LIMIT = 32


@dataclass(frozen=True, eq=False)
class SparseSymMatrix:
    """Symmetric matrix stored as its upper triangle in coordinate form.

    Attributes
    ----------
    n : int
        Dimension.
    rows, cols : ndarray of int
        Entry positions with ``rows <= cols``, sorted and unique.
    vals : ndarray of float
    """

    n: int
    rows: np.ndarray
    cols: np.ndarray
    vals: np.ndarray

    def __post_init__(self):
        if np.any(self.rows > self.cols):
            raise ValueError("SparseSymMatrix stores the upper triangle only")
        diag = self.rows == self.cols
        object.__setattr__(self, "_diag", diag)

    @classmethod
    def from_dense(cls, a, tol: float = 0.0) -> "SparseSymMatrix":
        """Pack the upper triangle of ``a``; entries with ``|a_ij| <= tol`` are
        dropped except on the diagonal."""
        a = np.asarray(a, dtype=float)
        n = a.shape[0]
        r, c = np.triu_indices(n)
        keep = (r == c) | (np.abs(a[r, c]) > tol)
        return cls(n, r[keep], c[keep], a[r[keep], c[keep]].copy())

    @classmethod
    def from_triplets(cls, n: int, rows, cols, vals) -> "SparseSymMatrix":
        """Sum duplicate ``(row, col)`` upper-triangle entries."""
        rows = np.asarray(rows, dtype=np.intp)
        cols = np.asarray(cols, dtype=np.intp)
        vals = np.asarray(vals, dtype=float)
        key = rows * n + cols
        uniq, inv = np.unique(key, return_inverse=True)
        summed = np.zeros(uniq.size)
        np.add.at(summed, inv, vals)
        return cls(n, uniq // n, uniq % n, summed)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n, self.n)

    def diagonal(self) -> np.ndarray:
        d = np.zeros(self.n)
        d[self.rows[self._diag]] = self.vals[self._diag]
        return d

    def matvec(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        y = np.zeros(self.n)
        np.add.at(y, self.rows, self.vals * x[self.cols])
        off = ~self._diag
        np.add.at(y, self.cols[off], self.vals[off] * x[self.rows[off]])
        return y

    __matmul__ = matvec

    def toarray(self) -> np.ndarray:
        a = np.zeros((self.n, self.n))
        a[self.rows, self.cols] = self.vals
        a[self.cols, self.rows] = self.vals
        return a

    def scaled(self, c: float) -> "SparseSymMatrix":
        return SparseSymMatrix(self.n, self.rows, self.cols, c * self.vals)

    def __neg__(self) -> "SparseSymMatrix":
        return self.scaled(-1.0)

    def norm_inf(self) -> float:
        """Maximum absolute row sum."""
        y = np.zeros(self.n)
        a = np.abs(self.vals)
        np.add.at(y, self.rows, a)
        off = ~self._diag
        np.add.at(y, self.cols[off], a[off])
        return float(y.max(initial=0.0))


def _as_operator(A):
    if isinstance(A, SparseSymMatrix):
        return A.n, A.matvec, A.diagonal()
    A = np.asarray(A, dtype=float)
    return A.shape[0], (lambda x: A @ x), np.diag(A).copy()


def cg_solve(A, b, tol: float = 1e-12, max_iter: int | None = None) -> np.ndarray:
    """Solve ``A x = b`` for symmetric positive definite ``A``.

    Jacobi-preconditioned conjugate gradients, stopped once
    ``||A x - b|| <= tol ||b||`` (checked on the recomputed residual).

    Parameters
    ----------
    A : SparseSymMatrix or ndarray
    b : array_like
    tol : float
    max_iter : int, optional
        Defaults to ``20 N``.

    Raises
    ------
    LinearSolveFailure
        If ``A`` shows a nonpositive curvature direction or the iteration
        stagnates before reaching ``tol``.
    """
    n, mv, diag = _as_operator(A)
    b = np.asarray(b, dtype=float)
    if tol <= 0:
        raise ValueError("tol must be positive")
    if max_iter is None:
        max_iter = 20 * n
    bnorm = float(np.linalg.norm(b))
    x = np.zeros(n)
    if bnorm == 0.0:
        return x
    if np.any(diag <= 0):
        raise LinearSolveFailure("matrix has a nonpositive diagonal entry; not SPD")
    inv_d = 1.0 / diag

    r = b.copy()
    z = inv_d * r
    p = z.copy()
    rz = float(r @ z)
    for it in range(max_iter):
        Ap = mv(p)
        pAp = float(p @ Ap)
        if not pAp > 0:
            raise LinearSolveFailure(f"nonpositive curvature p'Ap = {pAp:.3e} at iteration {it}")
        a = rz / pAp
        x += a * p
        r -= a * Ap
        if np.linalg.norm(r) <= tol * bnorm:
            # recompute to guard against drift in the recursive residual
            r = b - mv(x)
            if np.linalg.norm(r) <= tol * bnorm:
                return x
        z = inv_d * r
        rz_new = float(r @ z)
        p = z + (rz_new / rz) * p
        rz = rz_new
    res = float(np.linalg.norm(b - mv(x))) / bnorm
    raise LinearSolveFailure(
        f"conjugate gradients stagnated after {max_iter} iterations (relative residual {res:.3e})"
    )


def max_eigenvalue(A, rtol: float = 1e-8, max_iter: int = 100_000) -> float:
    """Largest (algebraic) eigenvalue of a symmetric matrix.

    Dense ``eigvalsh`` for ``N <= 32``; otherwise power iteration on
    ``A + s I`` with ``s`` the infinity norm, which makes the shifted matrix
    positive semidefinite so that its dominant eigenvalue is the wanted one.

    Raises
    ------
    NoConvergence
    """
    if isinstance(A, SparseSymMatrix):
        n = A.n
        if n <= DENSE_LIMIT:
            return float(np.linalg.eigvalsh(A.toarray())[-1])
        mv, shift = A.matvec, A.norm_inf()
    else:
        A = np.asarray(A, dtype=float)
        n = A.shape[0]
        if n <= DENSE_LIMIT:
            return float(np.linalg.eigvalsh(A)[-1])
        mv, shift = (lambda x: A @ x), float(np.abs(A).sum(axis=1).max())
    return _power_max(mv, n, shift, rtol, max_iter)


def _power_max(mv, n, shift, rtol, max_iter):
    # deterministic start with no special symmetry
    x = 1.0 + 0.1 * np.cos(np.arange(n) * 1.618)
    x /= np.linalg.norm(x)
    floor = np.finfo(float).eps * max(shift, 1e-300)
    for _ in range(max_iter):
        ax = mv(x)
        lam = float(x @ ax)
        # stop on the eigen-residual of the unshifted pair, which bounds the
        # eigenvalue error even when the spectral gap is small
        if np.linalg.norm(ax - lam * x) <= rtol * max(abs(lam), floor):
            return lam
        y = ax + shift * x
        ny = np.linalg.norm(y)
        if ny == 0.0:
            return -shift
        x = y / ny
    raise NoConvergence(f"power iteration did not converge in {max_iter} iterations")


def fd_jacobian(fn: Callable[[np.ndarray], np.ndarray], x, h: float = 1e-5) -> np.ndarray:
    """Central-difference Jacobian; column ``j`` is ``(fn(x+h e_j) - fn(x-h e_j)) / 2h``."""
    x = np.asarray(x, dtype=float)
    cols = []
    for j in range(x.size):
        e = np.zeros_like(x)
        e[j] = h
        cols.append((np.asarray(fn(x + e), dtype=float) - np.asarray(fn(x - e), dtype=float)) / (2 * h))
    return np.stack(cols, axis=-1)


@functools.lru_cache(maxsize=None)
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the ``n``-point rule on ``[0, 1]`` (read-only arrays)."""
    x, w = np.polynomial.legendre.leggauss(n)
    return _frozen(0.5 * (x + 1.0)), _frozen(0.5 * w)


@functools.lru_cache(maxsize=64)
def composite_nodes(n_sub: int, order: int = 16) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the composite rule with ``n_sub`` equal pieces of ``[0, 1]``."""
    x, w = gauss_legendre(order)
    left = np.arange(n_sub)[:, None] / n_sub
    return _frozen((left + x[None, :] / n_sub).ravel()), _frozen(np.tile(w / n_sub, n_sub))


def _frozen(a):
    a.flags.writeable = False
    return a
