"""Discrete conformal structures: weights, charts and edge-length laws.

A structure assigns to every ideal edge ``{ij}`` a length from the factors
``f_i, f_j`` at its ends.  All six laws share the scaled shape

    cosh l_ij = exp(f_i + f_j) * (eta_ij + b_ij * P_ij),

where ``b_ij = +-1`` selects the law and ``P_ij`` depends on the family:

* algebraic (``DCS3``/``MIXED1``): ``P = q_i q_j`` with ``q = sqrt(exp(-2f) + alpha)``;
* circular (``NEW1``/``MIXED2``, alpha = -1): ``P = q_i q_j`` with ``q = sqrt(1 - exp(-2f))``;
* exponential (``DCS1``/``MIXED3``): ``P = (exp(-2f_i) + exp(-2f_j)) / 2``.

Evaluating in this form keeps ``f`` of several hundred finite.

Each boundary component carries a chart ``u = u(f)`` with ``df/du = s_i C_i``,
where ``C_i = q_i exp(f_i)`` (``exp(f_i)`` for the exponential family) and
``s_i = +-1`` is the chart sign.  PLUS edges join components of equal sign and
MINUS edges components of opposite sign.  This is the only choice of charts for
which the angle Jacobian is symmetric.
"""

from __future__ import annotations

import enum
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from hexflow.errors import CapabilityError, DomainError, NotAdmissible, SchemeError
from hexflow.topology import IdealEdge, IdealTriangulation


class SchemeKind(enum.Enum):
    DCS3 = "DCS3"
    DCS1 = "DCS1"
    NEW1 = "NEW1"
    MIXED1 = "MIXED1"
    MIXED2 = "MIXED2"
    MIXED3 = "MIXED3"

    @classmethod
    def parse(cls, name) -> "SchemeKind":
        if isinstance(name, cls):
            return name
        try:
            return cls[str(name).upper()]
        except KeyError:
            raise SchemeError(
                f"unknown scheme {name!r}; expected one of {[k.name for k in cls]}"
            ) from None

    @property
    def mixed(self) -> bool:
        return self in (SchemeKind.MIXED1, SchemeKind.MIXED2, SchemeKind.MIXED3)

    @property
    def family(self) -> str:
        return _FAMILY[self]


class Variant(enum.IntEnum):
    PLUS = 1
    MINUS = -1

    @classmethod
    def parse(cls, v) -> "Variant":
        if isinstance(v, cls):
            return v
        if isinstance(v, str):
            try:
                return cls[v.upper()]
            except KeyError:
                pass
        elif v in (1, -1):
            return cls(int(v))
        raise SchemeError(f"variant must be PLUS or MINUS, got {v!r}")


_FAMILY = {
    SchemeKind.DCS3: "algebraic",
    SchemeKind.MIXED1: "algebraic",
    SchemeKind.NEW1: "circular",
    SchemeKind.MIXED2: "circular",
    SchemeKind.DCS1: "exponential",
    SchemeKind.MIXED3: "exponential",
}

# Sign b of the P-term for PLUS / MINUS edges, per family.
_BASE_SIGN = {
    "algebraic": {1: -1.0, -1: 1.0},  # DCS3, DCS4
    "circular": {1: 1.0, -1: -1.0},  # new1, new2
    "exponential": {1: -1.0, -1: 1.0},  # DCS1, DCS2
}

# chart codes
IDENTITY, SINH, COSH, EXP, SIN = "identity", "sinh", "cosh", "exp", "sin"

_HALF_PI = 0.5 * math.pi


def _chart_code(family: str, alpha: int) -> str:
    if family == "exponential":
        return EXP
    if family == "circular":
        return SIN
    return {0: IDENTITY, 1: SINH, -1: COSH}[alpha]


# Base charts (sign +1).  u = s * base_u(f), f = base_f(s * u).
def _base_u(code, f):
    if code == IDENTITY:
        return f
    if code == SINH:
        return -np.arcsinh(np.exp(-f))
    if code == COSH:
        return -np.arccosh(np.exp(-f))
    if code == EXP:
        return -np.exp(-f)
    return -np.arcsin(np.exp(-f))


def _log_sinh(x):
    # x > 0
    x = np.asarray(x, dtype=float)
    small = x < 20.0
    out = np.empty_like(x)
    out[small] = np.log(np.sinh(x[small]))
    xb = x[~small]
    out[~small] = xb + np.log1p(-np.exp(-2.0 * xb)) - math.log(2.0)
    return out


def _log_cosh(x):
    x = np.abs(np.asarray(x, dtype=float))
    return x + np.log1p(np.exp(-2.0 * x)) - math.log(2.0)


def _base_f(code, v):
    if code == IDENTITY:
        return v
    if code == SINH:
        return -_log_sinh(-v)
    if code == COSH:
        return -_log_cosh(v)
    if code == EXP:
        return -np.log(-v)
    return -np.log(np.sin(-v))


def _base_domain(code) -> tuple[float, float]:
    if code == IDENTITY:
        return (-math.inf, math.inf)
    if code == SIN:
        return (-_HALF_PI, 0.0)
    return (-math.inf, 0.0)


def _f_domain(code) -> tuple[float, float]:
    if code == COSH:
        return (-math.inf, 0.0)
    if code == SIN:
        return (0.0, math.inf)
    return (-math.inf, math.inf)


def _chart_scale(code, f):
    """Unsigned df/du of the base chart."""
    if code == IDENTITY:
        return np.ones_like(f)
    if code == SINH:
        return np.sqrt(1.0 + np.exp(2.0 * f))
    if code == COSH:
        return np.sqrt(-np.expm1(2.0 * f))
    if code == EXP:
        return np.exp(f)
    return np.sqrt(np.expm1(2.0 * f))


def _reduced_q(code, f):
    """C * exp(-f) for the algebraic and circular families."""
    if code == IDENTITY:
        return np.exp(-f)
    if code == SINH:
        return np.sqrt(np.exp(-2.0 * f) + 1.0)
    if code == COSH:
        return np.sqrt(np.expm1(-2.0 * f))
    if code == SIN:
        return np.sqrt(-np.expm1(-2.0 * f))
    raise ValueError("exponential family has no reduced q")


@dataclass(frozen=True, eq=False)
class SchemeConfig:
    """Weights of a discrete conformal structure on a fixed triangulation.

    Build instances with :func:`make_scheme`, which validates the weights and
    derives the chart signs.  Arrays are indexed by boundary id (``alpha``,
    ``sign``) or edge id (``eta``, ``variant``).
    """

    kind: SchemeKind
    alpha: np.ndarray
    eta: np.ndarray
    variant: np.ndarray
    sign: np.ndarray
    edge_ends: np.ndarray = field(repr=False)
    charts: tuple = field(repr=False, default=())

    def __post_init__(self):
        codes = tuple(_chart_code(self.kind.family, int(a)) for a in self.alpha)
        object.__setattr__(self, "charts", codes)
        groups = {}
        for i, c in enumerate(codes):
            groups.setdefault(c, []).append(i)
        object.__setattr__(
            self, "_groups", tuple((c, np.array(ix, dtype=np.intp)) for c, ix in groups.items())
        )
        base = _BASE_SIGN[self.kind.family]
        object.__setattr__(
            self, "base_sign", np.array([base[int(v)] for v in self.variant], dtype=float)
        )

    @property
    def n_boundaries(self) -> int:
        return len(self.alpha)

    @property
    def n_edges(self) -> int:
        return len(self.eta)

    @property
    def global_convergence(self) -> bool:
        """Whether both flows are known to converge from every admissible start."""
        if self.kind is SchemeKind.DCS3:
            return bool(np.all(self.alpha >= 0))
        if self.kind is SchemeKind.DCS1:
            return True
        if self.kind is SchemeKind.NEW1:
            return bool(np.all(self.eta <= 0.0))
        return False

    def require_solvable(self) -> None:
        if self.kind in (SchemeKind.DCS3, SchemeKind.MIXED1) and np.any(self.alpha < 0):
            raise CapabilityError(
                f"{self.kind.name} with alpha = -1 is supported for evaluation only"
            )

    # vectorised charts -------------------------------------------------

    def f_from_u(self, u) -> np.ndarray:
        """Map u-coordinates (shape ``(..., N)``) to f-coordinates."""
        u = np.asarray(u, dtype=float)
        out = np.empty_like(u)
        for code, ix in self._groups:
            out[..., ix] = _base_f(code, u[..., ix] * self.sign[ix])
        return out

    def u_from_f(self, f) -> np.ndarray:
        f = np.asarray(f, dtype=float)
        out = np.empty_like(f)
        for code, ix in self._groups:
            out[..., ix] = self.sign[ix] * _base_u(code, f[..., ix])
        return out

    def chart_derivative(self, f) -> np.ndarray:
        """Signed ``df/du`` at each boundary component."""
        f = np.asarray(f, dtype=float)
        out = np.empty_like(f)
        for code, ix in self._groups:
            out[..., ix] = self.sign[ix] * _chart_scale(code, f[..., ix])
        return out

    def chart_scale(self, f) -> np.ndarray:
        """Unsigned ``C_i``."""
        f = np.asarray(f, dtype=float)
        out = np.empty_like(f)
        for code, ix in self._groups:
            out[..., ix] = _chart_scale(code, f[..., ix])
        return out

    def domain_violations(self, u) -> np.ndarray:
        """Boolean mask (shape of ``u``) of coordinates outside their chart."""
        u = np.asarray(u, dtype=float)
        bad = ~np.isfinite(u)
        for code, ix in self._groups:
            lo, hi = _base_domain(code)
            v = u[..., ix] * self.sign[ix]
            bad[..., ix] |= ~((v > lo) & (v < hi))
        return bad

    def log_cosh_lengths(self, f) -> np.ndarray:
        """``log cosh l`` for every edge, NaN where ``cosh l <= 0``."""
        f = np.asarray(f, dtype=float)
        a, b = self.edge_ends[:, 0], self.edge_ends[:, 1]
        fa, fb = f[..., a], f[..., b]
        if self.kind.family == "exponential":
            la = lb = None
            qa = qb = None
        else:
            lcs = np.empty_like(f)
            q = np.empty_like(f)
            with np.errstate(all="ignore"):
                for code, ix in self._groups:
                    lcs[..., ix] = _log_chart_scale(code, f[..., ix])
                    q[..., ix] = _reduced_q(code, f[..., ix])
            la, lb, qa, qb = lcs[..., a], lcs[..., b], q[..., a], q[..., b]
        return _pair_log_cosh(self.kind.family, self.eta, self.base_sign, fa, fb, la, lb, qa, qb)


# Below this bound on |f| the length law is evaluated as cosh l - 1 directly,
# which keeps short edges accurate; above it the scaled form avoids overflow.
_DIRECT_LIMIT = 300.0


def _log_chart_scale(code, f):
    if code == IDENTITY:
        return np.zeros_like(f)
    if code == SINH:
        return 0.5 * np.log1p(np.exp(2.0 * f))
    if code == COSH:
        return 0.5 * np.log1p(-np.exp(2.0 * f))
    if code == SIN:
        return 0.5 * np.log(np.expm1(2.0 * f))
    raise ValueError("exponential family has no chart scale product")


def _pair_log_cosh(family, eta, bsign, fa, fb, la, lb, qa, qb):
    """``log cosh l`` from the factors at both ends.

    ``cosh l = eta exp(fa + fb) + b G`` with ``G = C_a C_b`` (``la``, ``lb``
    are ``log C``) or ``G = cosh(fa - fb)`` for the exponential family.
    ``qa``, ``qb`` are the reduced ``C exp(-f)`` used by the scaled form.
    """
    with np.errstate(all="ignore"):
        s = fa + fb
        if family == "exponential":
            gm1 = 2.0 * np.sinh(0.5 * (fa - fb)) ** 2
            p = 0.5 * (np.exp(-2.0 * fa) + np.exp(-2.0 * fb))
        else:
            gm1 = np.expm1(la + lb)
            p = qa * qb
        x = eta * np.exp(s) + np.where(bsign > 0, gm1, -gm1 - 2.0)
        direct = np.where(x > -1.0, np.log1p(x), np.nan)
        small = (np.abs(fa) < _DIRECT_LIMIT) & (np.abs(fb) < _DIRECT_LIMIT)
        if np.all(small):
            return direct
        bracket = eta + bsign * p
        scaled = np.where(bracket > 0, s + np.log(bracket), np.nan)
    return np.where(small, direct, scaled)


def lengths_from_log_cosh(lc):
    """Edge lengths from ``log cosh l``; NaN where ``lc <= 0``."""
    lc = np.asarray(lc, dtype=float)
    with np.errstate(invalid="ignore", over="ignore"):
        x = np.expm1(lc)
        near = np.log1p(x + np.sqrt(x * (x + 2.0)))
        far = lc + np.log1p(np.sqrt(-np.expm1(-2.0 * lc)))
        out = np.where(lc < 20.0, near, far)
    return np.where(lc > 0, out, np.nan)


def make_scheme(
    kind,
    tri: IdealTriangulation,
    eta,
    alpha=None,
    variant=None,
    sign=None,
) -> SchemeConfig:
    """Validate weights and build a :class:`SchemeConfig`.

    ``eta`` may be a scalar, a sequence indexed by edge id or a mapping from
    edge id.  ``alpha`` (per boundary) defaults to 0 for the algebraic and
    exponential families and is fixed to -1 for the circular family.
    ``variant`` (per edge, PLUS/MINUS) is only meaningful for mixed schemes.
    ``sign`` fixes the chart signs explicitly; by default they are derived from
    the variants (see :func:`chart_signs`).
    """
    kind = SchemeKind.parse(kind)
    n, m = tri.n_boundaries, tri.n_edges
    eta_arr = _per_item(eta, m, "eta", float)
    if kind.family == "circular":
        default_alpha = -1
    else:
        default_alpha = 0
    alpha_arr = _per_item(default_alpha if alpha is None else alpha, n, "alpha", float)
    if np.any(alpha_arr != np.round(alpha_arr)):
        raise SchemeError("alpha must be integer valued")
    alpha_arr = alpha_arr.astype(int)
    if variant is None:
        var_arr = np.ones(m, dtype=int)
    else:
        raw = variant if not isinstance(variant, (str, Variant, int)) else [variant] * m
        if isinstance(raw, Mapping):
            raw = [raw.get(e, Variant.PLUS) for e in range(m)]
        if len(raw) != m:
            raise SchemeError(f"variant needs {m} entries, got {len(raw)}")
        var_arr = np.array([int(Variant.parse(v)) for v in raw], dtype=int)

    _check_weights(kind, tri, alpha_arr, eta_arr, var_arr)
    signs = chart_signs(tri, var_arr, given=sign)
    return SchemeConfig(kind, alpha_arr, eta_arr, var_arr, signs, tri.edge_ends.copy())


def _per_item(value, count, name, dtype):
    if isinstance(value, Mapping):
        try:
            arr = np.array([value[k] for k in range(count)], dtype=dtype)
        except KeyError as exc:
            raise SchemeError(f"{name} is missing entry {exc.args[0]}") from None
    elif np.ndim(value) == 0:
        arr = np.full(count, value, dtype=dtype)
    else:
        arr = np.array(value, dtype=dtype)
        if arr.shape != (count,):
            raise SchemeError(f"{name} needs {count} entries, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise SchemeError(f"{name} must be finite")
    return arr


def _check_weights(kind, tri, alpha, eta, variant):
    fam = kind.family
    if fam == "circular" and np.any(alpha != -1):
        raise SchemeError(f"{kind.name} requires alpha = -1 on every boundary")
    if fam == "exponential" and np.any(alpha != 0):
        raise SchemeError(f"{kind.name} has no alpha weight; leave it 0")
    if fam == "algebraic" and np.any(np.abs(alpha) > 1):
        raise SchemeError("alpha must take values in {-1, 0, 1}")
    if not kind.mixed and np.any(variant != 1):
        raise SchemeError(f"{kind.name} is not a mixed scheme; every edge must be PLUS")

    ends = tri.edge_ends
    bad = None
    if kind is SchemeKind.DCS3:
        prod = alpha[ends[:, 0]] * alpha[ends[:, 1]]
        bad = np.flatnonzero((eta <= 0) | (eta <= prod))
        msg = "DCS3 needs eta > 0 and eta > alpha_i * alpha_j"
    elif kind in (SchemeKind.DCS1, SchemeKind.MIXED3):
        bad = np.flatnonzero(eta <= 0)
        msg = f"{kind.name} needs eta > 0"
    elif kind is SchemeKind.NEW1:
        bad = np.flatnonzero(eta <= -1)
        msg = "NEW1 needs eta > -1"
    elif kind is SchemeKind.MIXED1:
        bad = np.flatnonzero(eta <= 1)
        msg = "MIXED1 needs eta > 1"
    else:
        bad = np.flatnonzero(eta < 1)
        msg = "MIXED2 needs eta >= 1"
    if bad.size:
        e = int(bad[0])
        raise SchemeError(f"{msg}; violated on edge {e} {tuple(int(v) for v in ends[e])} (eta = {eta[e]:g})")


def chart_signs(tri: IdealTriangulation, variant, given=None) -> np.ndarray:
    """Chart signs compatible with the edge variants.

    Signs must agree across PLUS edges and differ across MINUS edges.  Each
    connected component has two solutions; the one chosen makes the most
    all-PLUS faces positive (those faces are negative definite only with
    positive charts), then the most components positive, then the lowest
    boundary id positive.

    Raises
    ------
    SchemeError
        If the variant pattern admits no sign assignment or ``given``
        contradicts it.
    """
    n = tri.n_boundaries
    variant = np.asarray(variant, dtype=int)
    nbrs = [[] for _ in range(n)]
    for e in tri.edges:
        a, b = e.ends
        nbrs[a].append((b, variant[e.id], e.id))
        nbrs[b].append((a, variant[e.id], e.id))

    sign = np.zeros(n, dtype=int)
    comp = np.full(n, -1, dtype=int)
    ncomp = 0
    for root in range(n):
        if sign[root]:
            continue
        sign[root] = 1
        comp[root] = ncomp
        queue = deque([root])
        while queue:
            i = queue.popleft()
            for j, v, eid in nbrs[i]:
                want = sign[i] * v
                if sign[j] == 0:
                    sign[j] = want
                    comp[j] = ncomp
                    queue.append(j)
                elif sign[j] != want:
                    raise SchemeError(
                        f"edge variants admit no consistent chart signs (conflict at edge {eid}); "
                        "every face must carry an even number of MINUS edges"
                    )
        ncomp += 1

    for c in range(ncomp):
        members = np.flatnonzero(comp == c)
        pure_pos = pure_neg = 0
        for f in tri.faces:
            if comp[f.corners[0]] != c:
                continue
            s = sign[list(f.corners)]
            if np.all(variant[list(f.edges)] == 1):
                pure_pos += int(s[0] > 0)
                pure_neg += int(s[0] < 0)
        score = (pure_pos - pure_neg, int(np.sum(sign[members])))
        if score < (0, 0):
            sign[members] *= -1

    if given is not None:
        given = np.asarray(given, dtype=int)
        if given.shape != (n,) or not np.all(np.abs(given) == 1):
            raise SchemeError("sign must list +1 or -1 for every boundary")
        for e in tri.edges:
            a, b = e.ends
            if given[a] * given[b] != variant[e.id]:
                raise SchemeError(
                    f"given chart signs contradict the variant of edge {e.id} {e.ends}"
                )
        sign = given
    return sign.astype(float)


# --- scalar operations -----------------------------------------------------


def domain_of_u(cfg: SchemeConfig, i: int) -> tuple[float, float]:
    """Open interval of admissible u-values at boundary ``i``."""
    lo, hi = _base_domain(cfg.charts[i])
    if cfg.sign[i] < 0:
        lo, hi = -hi, -lo
    return (lo, hi)


def f_domain(cfg: SchemeConfig, i: int) -> tuple[float, float]:
    return _f_domain(cfg.charts[i])


def u_from_f(cfg: SchemeConfig, i: int, f: float) -> float:
    """Discrete conformal factor u from f at boundary ``i``."""
    lo, hi = _f_domain(cfg.charts[i])
    if not (lo < f < hi):
        raise DomainError(f"f = {f!r} outside the chart domain ({lo}, {hi}) at boundary {i}")
    return float(cfg.sign[i] * _base_u(cfg.charts[i], np.float64(f)))


def f_from_u(cfg: SchemeConfig, i: int, u: float) -> float:
    lo, hi = domain_of_u(cfg, i)
    if not (lo < u < hi):
        raise DomainError(f"u = {u!r} outside the chart domain ({lo}, {hi}) at boundary {i}")
    return float(_base_f(cfg.charts[i], np.float64(u * cfg.sign[i])))


def chart_scale_at(cfg: SchemeConfig, i: int, f: float) -> float:
    """Unsigned chart scale ``C_i`` at one boundary component."""
    return float(_chart_scale(cfg.charts[i], np.float64(f)))


def _edge(cfg, edge) -> tuple[int, int, int]:
    if isinstance(edge, IdealEdge):
        return edge.id, edge.ends[0], edge.ends[1]
    eid = int(edge)
    a, b = cfg.edge_ends[eid]
    return eid, int(a), int(b)


def edge_log_cosh(cfg: SchemeConfig, edge, f_i: float, f_j: float) -> float:
    """``log cosh l`` of one edge; ``f_i``, ``f_j`` follow ``edge.ends``."""
    eid, a, b = _edge(cfg, edge)
    for r, fr in ((a, f_i), (b, f_j)):
        lo, hi = _f_domain(cfg.charts[r])
        if not (lo < fr < hi):
            raise DomainError(f"f = {fr!r} outside the chart domain at boundary {r}")
    fam = cfg.kind.family
    ca, cb = cfg.charts[a], cfg.charts[b]
    fa, fb = np.float64(f_i), np.float64(f_j)
    if fam == "exponential":
        la = lb = qa = qb = None
    else:
        with np.errstate(all="ignore"):
            la, lb = _log_chart_scale(ca, fa), _log_chart_scale(cb, fb)
            qa, qb = _reduced_q(ca, fa), _reduced_q(cb, fb)
    lc = float(_pair_log_cosh(fam, cfg.eta[eid], cfg.base_sign[eid], fa, fb, la, lb, qa, qb))
    return lc if math.isfinite(lc) else -math.inf


def edge_length(cfg: SchemeConfig, edge, f_i: float, f_j: float) -> float:
    """Length of an ideal edge from the factors at its ends.

    Raises
    ------
    NotAdmissible
        If ``cosh l <= 1``.
    """
    eid, a, b = _edge(cfg, edge)
    lc = edge_log_cosh(cfg, edge, f_i, f_j)
    if not lc > 0:
        raise NotAdmissible(
            f"edge {eid} {(a, b)} is degenerate: cosh l = {math.exp(lc):.17g} <= 1",
            edges=[eid],
        )
    return float(lengths_from_log_cosh(lc))


def coth_d(cfg: SchemeConfig, edge, i: int, f_i: float, f_j: float, length: float) -> float:
    """Derivative ``dl_ij / df_i`` of the edge length, written ``coth d_ij``.

    ``i`` is the tail of the oriented edge; ``f_i`` belongs to ``i`` and
    ``f_j`` to the other end.  Equals ``(v C_j + cosh l C_i) / (sinh l C_i)``
    with ``v = +1`` for PLUS and ``-1`` for MINUS edges.
    """
    eid, a, b = _edge(cfg, edge)
    if i not in (a, b):
        raise DomainError(f"boundary {i} is not an end of edge {eid}")
    if not length > 0:
        raise DomainError("edge length must be positive")
    j = b if i == a else a
    ci = float(_chart_scale(cfg.charts[i], np.float64(f_i)))
    cj = float(_chart_scale(cfg.charts[j], np.float64(f_j)))
    if ci == 0:
        raise DomainError(f"chart is singular at boundary {i}")
    return (cfg.variant[eid] * cj + math.cosh(length) * ci) / (math.sinh(length) * ci)


@dataclass
class AdmissibilityReport:
    ok: bool
    bad_edges: list = field(default_factory=list)
    bad_boundaries: list = field(default_factory=list)
    log_cosh: np.ndarray | None = None

    def __bool__(self):
        return self.ok

    def describe(self, tri: IdealTriangulation | None = None) -> str:
        if self.ok:
            return "admissible"
        parts = []
        if self.bad_boundaries:
            parts.append(f"factor outside chart at boundary {self.bad_boundaries}")
        if self.bad_edges:
            if tri is not None:
                names = [str(tri.edges[e].ends) for e in self.bad_edges]
                parts.append("degenerate edge(s) " + ", ".join(names))
            else:
                parts.append(f"degenerate edge(s) {self.bad_edges}")
        return "; ".join(parts)


def admissible(cfg: SchemeConfig, tri: IdealTriangulation, u) -> AdmissibilityReport:
    """Check that ``u`` lies in every chart and every edge has ``cosh l > 1``."""
    u = np.asarray(u, dtype=float)
    if u.shape != (tri.n_boundaries,):
        raise ValueError(f"expected {tri.n_boundaries} factors, got shape {u.shape}")
    dom = cfg.domain_violations(u)
    if dom.any():
        return AdmissibilityReport(False, [], [int(i) for i in np.flatnonzero(dom)])
    with np.errstate(all="ignore"):
        lc = cfg.log_cosh_lengths(cfg.f_from_u(u))
    bad = np.flatnonzero(~(lc > 0))
    return AdmissibilityReport(bad.size == 0, [int(e) for e in bad], [], lc)


def is_admissible(cfg: SchemeConfig, u) -> np.ndarray:
    """Vectorised admissibility for ``u`` of shape ``(..., N)``."""
    u = np.asarray(u, dtype=float)
    ok = ~cfg.domain_violations(u).any(axis=-1)
    with np.errstate(all="ignore"):
        lc = cfg.log_cosh_lengths(cfg.f_from_u(u))
    return ok & np.all(lc > 0, axis=-1)


def default_box(cfg: SchemeConfig, i: int, width: float = 3.0) -> tuple[float, float]:
    """Finite sampling box inside the chart domain of boundary ``i``."""
    lo, hi = domain_of_u(cfg, i)
    return (max(lo, -width), min(hi, width))


def sample_admissible(
    cfg: SchemeConfig,
    tri: IdealTriangulation,
    rng: np.random.Generator,
    box: Sequence[tuple[float, float]] | None = None,
    max_tries: int = 100_000,
) -> np.ndarray:
    """Rejection-sample a uniformly random admissible factor vector.

    Coordinates are drawn uniformly from ``box`` (default
    :func:`default_box` per boundary) until the draw is admissible.
    """
    n = tri.n_boundaries
    if box is None:
        box = [default_box(cfg, i) for i in range(n)]
    lo = np.array([b[0] for b in box], dtype=float)
    hi = np.array([b[1] for b in box], dtype=float)
    batch = 64
    for _ in range(0, max_tries, batch):
        cand = rng.uniform(lo, hi, size=(batch, n))
        ok = is_admissible(cfg, cand)
        if ok.any():
            return cand[np.argmax(ok)]
    raise NotAdmissible(f"no admissible sample found in {max_tries} draws")
