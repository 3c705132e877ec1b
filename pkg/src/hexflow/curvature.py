"""Curvature map, discrete Laplacian and the two energies.

``K_i`` is the total length of boundary component ``i``: the sum of the
boundary arcs of all hexagon corners sitting on it.  Its Jacobian in the
u-coordinates is the discrete Laplacian ``Delta``.  Everything here is
vectorised over faces; sums over corners run in ascending face order so that
repeated evaluations are bit-identical.
"""

from __future__ import annotations

import weakref
from dataclasses import dataclass

import numpy as np

from hexflow.errors import (
    ChartAsymmetry,
    NotAdmissible,
    PathLeavesAdmissible,
    QuadratureNoConvergence,
)
from hexflow.hexagon import angle_kernel, jacobian_kernel
from hexflow.numerics import SparseSymMatrix, composite_nodes
from hexflow.schemes import SchemeConfig, admissible, lengths_from_log_cosh
from hexflow.topology import IdealTriangulation

ASYMMETRY_LIMIT = 1e-6

_GATHER = weakref.WeakKeyDictionary()


def _gather_index(tri: IdealTriangulation) -> np.ndarray:
    """Padded ``(N, max degree)`` index into the flattened ``(F*3,)`` corner
    array; padding points at an extra zero slot."""
    idx = _GATHER.get(tri)
    if idx is None:
        deg = max(len(v) for v in tri.corner_index.values())
        idx = np.full((tri.n_boundaries, deg), 3 * tri.n_faces, dtype=np.intp)
        for i in range(tri.n_boundaries):
            for k, (fid, r) in enumerate(tri.corner_index[i]):
                idx[i, k] = 3 * fid + r
        _GATHER[tri] = idx
    return idx


def _check_shape(tri, u):
    u = np.asarray(u, dtype=float)
    if u.shape[-1:] != (tri.n_boundaries,):
        raise ValueError(f"expected {tri.n_boundaries} factors, got shape {u.shape}")
    return u


def _require_admissible(cfg, tri, u):
    rep = admissible(cfg, tri, u)
    if not rep:
        raise NotAdmissible(rep.describe(tri), rep.bad_edges, rep.bad_boundaries)
    return rep


def _face_log_cosh(cfg, tri, u):
    with np.errstate(all="ignore"):
        f = cfg.f_from_u(u)
        lc = cfg.log_cosh_lengths(f)
    bad = cfg.domain_violations(u).any(axis=-1)
    lc = np.where(bad[..., None], np.nan, lc)
    return f, lc[..., tri.face_edges]


def corner_angles_batch(cfg: SchemeConfig, tri: IdealTriangulation, u) -> np.ndarray:
    """Boundary arcs ``(..., F, 3)`` for factors ``(..., N)``; NaN on
    inadmissible rows."""
    u = _check_shape(tri, u)
    _, lcf = _face_log_cosh(cfg, tri, u)
    with np.errstate(all="ignore"):
        _, theta = angle_kernel(lcf)
    ok = np.all(lcf > 0, axis=(-2, -1))
    return np.where(ok[..., None, None], theta, np.nan)


def _sum_corners(tri, theta):
    flat = theta.reshape(theta.shape[:-2] + (3 * tri.n_faces,))
    flat = np.concatenate([flat, np.zeros(flat.shape[:-1] + (1,))], axis=-1)
    idx = _gather_index(tri)
    K = flat[..., idx[:, 0]].copy()
    for k in range(1, idx.shape[1]):
        K += flat[..., idx[:, k]]
    return K


def curvature_batch(cfg: SchemeConfig, tri: IdealTriangulation, u) -> np.ndarray:
    """Curvature for factors of shape ``(..., N)``; rows that are not
    admissible come back as NaN instead of raising."""
    return _sum_corners(tri, corner_angles_batch(cfg, tri, u))


def corner_angles(cfg: SchemeConfig, tri: IdealTriangulation, u) -> np.ndarray:
    """Boundary arc at every corner, shape ``(F, 3)``.

    Raises
    ------
    NotAdmissible
    """
    u = _check_shape(tri, u)
    _require_admissible(cfg, tri, u)
    return corner_angles_batch(cfg, tri, u)


def edge_lengths(cfg: SchemeConfig, tri: IdealTriangulation, u) -> np.ndarray:
    """Length of every ideal edge, indexed by edge id.

    Raises
    ------
    NotAdmissible
    """
    u = _check_shape(tri, u)
    rep = _require_admissible(cfg, tri, u)
    return lengths_from_log_cosh(rep.log_cosh)


def curvature_K(cfg: SchemeConfig, tri: IdealTriangulation, u) -> np.ndarray:
    """Generalized combinatorial curvature ``K_i = sum of theta_i`` over the
    corners at boundary ``i``.

    Parameters
    ----------
    cfg : SchemeConfig
    tri : IdealTriangulation
    u : array_like, shape (N,)
        Discrete conformal factors.

    Returns
    -------
    ndarray, shape (N,)

    Raises
    ------
    NotAdmissible
        With the offending edges or boundary components attached.
    """
    return _sum_corners(tri, corner_angles(cfg, tri, u))


@dataclass(frozen=True, eq=False)
class DiscreteLaplacian(SparseSymMatrix):
    """``dK/du`` stored as a symmetric sparse matrix.

    ``asymmetry`` is ``max |J_ij - J_ji| / max |J_ij|`` of the matrix
    assembled from the face Jacobians before symmetrisation.
    """

    asymmetry: float = 0.0


def face_jacobians(cfg: SchemeConfig, tri: IdealTriangulation, u) -> np.ndarray:
    """Corner Jacobians ``d(theta)/d(u)`` of every face, shape ``(F, 3, 3)``.

    Raises
    ------
    NotAdmissible
    """
    u = _check_shape(tri, u)
    _require_admissible(cfg, tri, u)
    f, lcf = _face_log_cosh(cfg, tri, u)
    C = cfg.chart_scale(f)[tri.face_corners]
    sign = cfg.sign[tri.face_corners]
    var = cfg.variant[tri.face_edges].astype(float)
    return jacobian_kernel(lcf, C, sign, var)


_PATTERN = weakref.WeakKeyDictionary()


def _assembly_pattern(tri):
    """Map every face-Jacobian entry to its upper-triangle slot."""
    pat = _PATTERN.get(tri)
    if pat is None:
        n = tri.n_boundaries
        rr, ss = np.meshgrid(np.arange(3), np.arange(3), indexing="ij")
        I = tri.face_corners[:, rr.ravel()].ravel()
        J = tri.face_corners[:, ss.ravel()].ravel()
        key = np.minimum(I, J) * n + np.maximum(I, J)
        uniq, inv = np.unique(key, return_inverse=True)
        rows, cols = uniq // n, uniq % n
        pat = (inv, I <= J, rows, cols, rows == cols)
        _PATTERN[tri] = pat
    return pat


def laplacian(cfg: SchemeConfig, tri: IdealTriangulation, u, strict: bool = True) -> DiscreteLaplacian:
    """Discrete Laplacian ``Delta = dK/du`` at ``u``.

    Face Jacobians are scattered into the global matrix; each off-diagonal
    entry is the average of its ``(i, j)`` and ``(j, i)`` sums.

    Parameters
    ----------
    strict : bool
        Raise :class:`ChartAsymmetry` when the relative asymmetry before
        averaging exceeds 1e-6.

    Raises
    ------
    NotAdmissible
    ChartAsymmetry
    """
    return _assemble(tri, face_jacobians(cfg, tri, u), strict)


def _assemble(tri, J, strict):
    n = tri.n_boundaries
    inv, up, rows, cols, diag = _assembly_pattern(tri)
    vals = J.reshape(-1)
    upper = np.zeros(rows.size)
    lower = np.zeros(rows.size)
    np.add.at(upper, inv[up], vals[up])
    np.add.at(lower, inv[~up], vals[~up])
    scale = max(np.max(np.abs(upper), initial=0.0), np.max(np.abs(lower), initial=0.0))
    gap = np.max(np.abs(upper - lower)[~diag], initial=0.0)
    asym = float(gap / scale) if scale > 0 else 0.0
    if strict and asym > ASYMMETRY_LIMIT:
        raise ChartAsymmetry(
            f"Laplacian asymmetry {asym:.3e} exceeds {ASYMMETRY_LIMIT:g}; chart signs are inconsistent",
            asym,
        )
    sym = np.where(diag, upper, 0.5 * (upper + lower))
    return DiscreteLaplacian(n, rows, cols, sym, asym)


def curvature_and_laplacian(cfg: SchemeConfig, tri: IdealTriangulation, u, strict: bool = True):
    """``(K, Delta)`` at ``u`` from one evaluation of the edge lengths, or
    ``None`` when ``u`` is not admissible."""
    u = _check_shape(tri, u)
    f, lcf = _face_log_cosh(cfg, tri, u)
    if not np.all(lcf > 0):
        return None
    xtheta, theta = angle_kernel(lcf)
    C = cfg.chart_scale(f)[tri.face_corners]
    sign = cfg.sign[tri.face_corners]
    var = cfg.variant[tri.face_edges].astype(float)
    J = jacobian_kernel(lcf, C, sign, var, xtheta)
    return _sum_corners(tri, theta), _assemble(tri, J, strict)


def energy_C(cfg: SchemeConfig, tri: IdealTriangulation, u, Kbar) -> float:
    """``C(u) = 1/2 ||K(u) - Kbar||^2``.

    Raises
    ------
    NotAdmissible
    """
    r = curvature_K(cfg, tri, u) - _check_shape(tri, Kbar)
    return 0.5 * float(r @ r)


def segment_energy(
    cfg: SchemeConfig,
    tri: IdealTriangulation,
    a,
    b,
    Kbar,
    rtol: float = 1e-10,
    max_level: int = 12,
) -> float:
    """``-int_a^b (K - Kbar) . du`` along the straight segment from ``a`` to ``b``.

    Composite 16-point Gauss-Legendre; the number of pieces doubles until two
    successive estimates agree to ``rtol`` (or to rounding level of the
    integrand).

    Raises
    ------
    PathLeavesAdmissible
        A quadrature node is not admissible.
    QuadratureNoConvergence
    """
    a = _check_shape(tri, a)
    b = _check_shape(tri, b)
    Kbar = _check_shape(tri, Kbar)
    d = b - a
    if not np.any(d):
        return 0.0
    prev = None
    for level in range(max_level + 1):
        s, w = composite_nodes(2**level)
        U = a + s[:, None] * d
        K = curvature_batch(cfg, tri, U)
        if not np.all(np.isfinite(K)):
            k = int(np.argmax(~np.all(np.isfinite(K), axis=1)))
            raise PathLeavesAdmissible(f"segment leaves the admissible region near s = {s[k]:.6g}")
        val = -float(w @ ((K - Kbar) @ d))
        floor = 1e-14 * float(w @ ((np.abs(K) + np.abs(Kbar)) @ np.abs(d)))
        if prev is not None:
            gap = abs(val - prev)
            if gap <= rtol * abs(val) or gap <= floor:
                return val
        prev = val
    # usually the segment grazes a degenerate edge, where K has a log singularity
    lc = cfg.log_cosh_lengths(cfg.f_from_u(U))
    l_min = float(lengths_from_log_cosh(lc.min()))
    raise QuadratureNoConvergence(
        f"line integral did not settle after {2**max_level} subintervals"
        f" (shortest edge at the nodes: {l_min:.3g})"
    )


def energy_E(cfg: SchemeConfig, tri: IdealTriangulation, u, Kbar, u_ref) -> float:
    """Ricci energy ``E(u) = -int_{u_ref}^{u} sum_i (K_i - Kbar_i) du_i``.

    The integral follows the straight segment from ``u_ref``; any other
    admissible path gives the same value because ``Delta`` is symmetric.
    ``E`` is defined up to a constant, fixed here by ``E(u_ref) = 0``.

    Raises
    ------
    PathLeavesAdmissible
        An endpoint or a point of the segment is not admissible.
    QuadratureNoConvergence
    """
    for name, p in (("u", u), ("u_ref", u_ref)):
        rep = admissible(cfg, tri, _check_shape(tri, p))
        if not rep:
            raise PathLeavesAdmissible(f"{name} is not admissible: {rep.describe(tri)}")
    return segment_energy(cfg, tri, u_ref, u, Kbar)
