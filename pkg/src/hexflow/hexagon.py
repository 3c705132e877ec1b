"""Right-angled hyperbolic hexagons.

Conventions: for a face with corners ``(i, j, k)``, slot ``r`` of every
per-face triple refers either to corner ``r`` (angles ``theta_r``, the
boundary arcs) or to the ideal edge *opposite* corner ``r`` (lengths
``l_r``).  Arc and edge lengths obey

    cosh theta_i * sinh l_j * sinh l_k = cosh l_i + cosh l_j * cosh l_k.

Kernels take ``log cosh l`` instead of ``l`` so that very short and very
long edges both stay accurate.
"""

from __future__ import annotations

import math

import numpy as np

from hexflow.errors import DomainError, NotAdmissible
from hexflow.schemes import SchemeConfig, chart_scale_at, edge_log_cosh, lengths_from_log_cosh
from hexflow.topology import HexFace

_ROLL1 = [1, 2, 0]
_ROLL2 = [2, 0, 1]
_IDX = [0, 1, 2]


def log_cosh(l):
    """``log cosh l`` without overflow or loss of precision for small ``l``."""
    l = np.abs(np.asarray(l, dtype=float))
    s = np.sinh(0.5 * np.minimum(l, 20.0))
    near = np.log1p(2.0 * s * s)
    far = l + np.log1p(np.exp(-2.0 * l)) - math.log(2.0)
    return np.where(l < 20.0, near, far)


def _acosh1p(x):
    """``arccosh(1 + x)`` for ``x >= 0``."""
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        near = np.log1p(x + np.sqrt(x * (x + 2.0)))
        far = np.log(x) + math.log(2.0)
    return np.where(x < 1e150, near, far)


def angle_kernel(lc):
    """Boundary arcs from edge data.

    Parameters
    ----------
    lc : array_like, shape (..., 3)
        ``log cosh`` of the edge opposite each corner.

    Returns
    -------
    xtheta : ndarray, shape (..., 3)
        ``cosh theta - 1`` at each corner.
    theta : ndarray, shape (..., 3)
    """
    lc = np.asarray(lc, dtype=float)
    t = np.sqrt(-np.expm1(-2.0 * lc))  # tanh l
    om = np.exp(-2.0 * lc) / (1.0 + t)  # 1 - tanh l
    lc_s, lc_t = lc[..., _ROLL1], lc[..., _ROLL2]
    t_s, t_t = t[..., _ROLL1], t[..., _ROLL2]
    om_s, om_t = om[..., _ROLL1], om[..., _ROLL2]
    ratio = np.exp(lc - lc_s - lc_t)
    # cosh(theta) - 1 = (ratio + 1 - t_s t_t) / (t_s t_t), all terms positive
    with np.errstate(divide="ignore"):
        xtheta = (ratio + om_s + t_s * om_t) / (t_s * t_t)
    return xtheta, _acosh1p(xtheta)


def _check_lengths(ls):
    ls = np.asarray(ls, dtype=float)
    if not np.all(ls > 0):
        raise DomainError(f"hexagon edge lengths must be positive, got {ls.tolist()}")
    return ls


def angles_from_lengths(l_i: float, l_j: float, l_k: float) -> tuple[float, float, float]:
    """Boundary arcs ``(theta_i, theta_j, theta_k)`` of the hexagon with the given
    alternate side lengths; ``l_i`` is the side opposite arc ``theta_i``."""
    ls = _check_lengths([l_i, l_j, l_k])
    _, th = angle_kernel(log_cosh(ls))
    return tuple(float(v) for v in th)


def a_quantity(l_i: float, l_j: float, l_k: float) -> float:
    """``sinh l_r sinh l_s sinh theta_t``, the same for every labelling.

    Computed from the symmetric closed form
    ``sqrt(c_i^2 + c_j^2 + c_k^2 + 2 c_i c_j c_k - 1)`` with ``c = cosh l``.
    """
    c = np.cosh(_check_lengths([l_i, l_j, l_k]))
    return float(_a_from_cosh(c))


def _a_from_cosh(c):
    ci, cj, ck = c[..., 0], c[..., 1], c[..., 2]
    x = c - 1.0
    # c_i^2 + c_j^2 + c_k^2 + 2 c_i c_j c_k - 1 expanded around c = 1 so the
    # leading "-1" cancels exactly
    s2 = (
        x[..., 0] * (x[..., 0] + 2.0)
        + x[..., 1] * (x[..., 1] + 2.0)
        + x[..., 2] * (x[..., 2] + 2.0)
        + 2.0 * ci * cj * ck
        + 2.0
    )
    return np.sqrt(s2)


def jacobian_kernel(lc, chart_scale, chart_sign, variant, xtheta=None):
    """Angle Jacobian ``d(theta)/d(u)`` of a batch of hexagons.

    Evaluates the product ``dtheta/dl * dl/df * df/du``:

    * ``dtheta/dl = -(1/A) diag(sinh l) M`` with ``M`` holding ``-1`` on the
      diagonal and ``cosh theta_t`` off it;
    * ``dl_r/df_s = coth d_st = coth l_r + v_r C_t / (sinh l_r C_s)``;
    * ``df_s/du_s = sign_s C_s``.

    Parameters
    ----------
    lc : ndarray, shape (..., 3)
        ``log cosh`` of the edge opposite each corner.
    chart_scale : ndarray, shape (..., 3)
        Unsigned ``C`` at each corner.
    chart_sign : ndarray, shape (..., 3)
        Chart sign at each corner.
    variant : ndarray, shape (..., 3)
        +1 / -1 for PLUS / MINUS, per opposite edge.
    xtheta : ndarray, shape (..., 3), optional
        ``cosh theta - 1`` if already known.

    Returns
    -------
    ndarray, shape (..., 3, 3)
    """
    lc = np.asarray(lc, dtype=float)
    C = np.asarray(chart_scale, dtype=float)
    t = np.sqrt(-np.expm1(-2.0 * lc))  # tanh l
    coth_m1 = np.exp(-2.0 * lc) / ((1.0 + t) * t)  # coth l - 1
    inv_sh = np.exp(-lc) / t
    if xtheta is None:
        xtheta, _ = angle_kernel(lc)
    w = _sinh_over_a(lc, t)

    # Dt[q, x] = dl_q/df_x - 1 for the two ends x of edge q.  Working with
    # Dt and cosh(theta) - 1 avoids the cancellation that otherwise swamps
    # the off-diagonal entries when two edges of the face are long.
    # a = Dt[q, q+1], b = Dt[q, q+2] (indices mod 3)
    Cs, Ct = C[..., _ROLL1], C[..., _ROLL2]
    g = variant * inv_sh
    a = coth_m1 + g * Ct / Cs
    b = coth_m1 + g * Cs / Ct
    xs, xt = xtheta[..., _ROLL1], xtheta[..., _ROLL2]
    a_s, a_t = a[..., _ROLL1], a[..., _ROLL2]
    b_s, b_t = b[..., _ROLL1], b[..., _ROLL2]

    Jf = np.empty(lc.shape[:-1] + (3, 3))
    Jf[..., _IDX, _IDX] = -w * ((1.0 + xt) * (1.0 + b_s) + (1.0 + xs) * (1.0 + a_t))
    Jf[..., _IDX, _ROLL1] = w * (a - b_t - xs * (1.0 + b_t))
    Jf[..., _IDX, _ROLL2] = w * (b - a_s - xt * (1.0 + a_s))
    return Jf * (chart_sign * C)[..., None, :]


def _sinh_over_a(lc, t):
    """``sinh l_r / A`` per slot, scaled by ``cosh l_s cosh l_t`` when any edge
    is long enough for ``cosh l`` to overflow."""
    with np.errstate(over="ignore", invalid="ignore"):
        x = np.expm1(lc)
        direct = np.sqrt(x * (x + 2.0)) / _a_from_cosh(1.0 + x)[..., None]
    big = (lc.max(axis=-1) > 300.0)[..., None]
    if not np.any(big):
        return direct
    # A / (c_i c_j c_k) = sqrt(sum_r 1/(c_s c_t)^2 + 2/P - 1/P^2), P = c_i c_j c_k,
    # with the largest exponent k factored out
    lc_s, lc_t = lc[..., _ROLL1], lc[..., _ROLL2]
    tot = lc.sum(axis=-1)
    pair = -2.0 * (lc_s + lc_t)
    k = np.maximum(pair.max(axis=-1), -tot)
    S = (
        np.exp(pair - k[..., None]).sum(axis=-1)
        + 2.0 * np.exp(-tot - k)
        - np.exp(-2.0 * tot - k)
    )
    scaled = t * np.exp(-lc_s - lc_t - 0.5 * k[..., None]) / np.sqrt(S)[..., None]
    return np.where(big, scaled, direct)


def face_inputs(cfg: SchemeConfig, face: HexFace, f) -> tuple[np.ndarray, ...]:
    """Per-slot arrays ``(lc, C, sign, variant)`` for one face.

    ``f`` holds the f-values at ``face.corners`` in order.
    """
    f = np.asarray(f, dtype=float)
    fval = dict(zip(face.corners, f))
    lc = np.empty(3)
    for r, eid in enumerate(face.edges):
        a, b = (int(v) for v in cfg.edge_ends[eid])
        lc[r] = edge_log_cosh(cfg, eid, fval[a], fval[b])
    C = np.array([float(chart_scale_at(cfg, c, fval[c])) for c in face.corners])
    sign = cfg.sign[list(face.corners)]
    return lc, C, sign, cfg.variant[list(face.edges)].astype(float)


def face_lengths(cfg: SchemeConfig, face: HexFace, f) -> np.ndarray:
    """Lengths of the edges opposite each corner (NaN where degenerate)."""
    lc, _, _, _ = face_inputs(cfg, face, f)
    return lengths_from_log_cosh(lc)


def corner_jacobian(cfg: SchemeConfig, face: HexFace, f) -> np.ndarray:
    """``d(theta_i, theta_j, theta_k) / d(u_i, u_j, u_k)`` for one face.

    ``f`` holds the f-values at ``face.corners`` in order.

    Raises
    ------
    NotAdmissible
        If an edge of the face is degenerate.
    """
    lc, C, sign, var = face_inputs(cfg, face, f)
    bad = [face.edges[r] for r in range(3) if not lc[r] > 0]
    if bad:
        raise NotAdmissible(f"face {face.id} has degenerate edge(s) {bad}", edges=bad)
    return jacobian_kernel(lc, C, sign, var)
