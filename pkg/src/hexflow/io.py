"""JSON documents for surfaces, factors and targets; CSV traces.

Surface document::

    {
      "scheme": "DCS1",
      "eta": 3.0,                                   # optional default
      "boundaries": [{"id": 0, "alpha": 0}, ...],
      "faces": [[0, 1, 2], ...],                    # or {"corners": [...], "edges": [...]}
      "edges": [{"ends": [0, 1], "eta": 3.0, "variant": "PLUS", "id": "a"}, ...]
    }

Edge ``id`` labels are needed only when two boundary components share more
than one edge; faces then name the labels of their edges (``edges[r]``
opposite ``corners[r]``).  Factor documents are ``{"coords": "u" | "f",
"values": [...]}`` and target documents ``{"K": [...]}``.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from hexflow.errors import DomainError, HexflowError, SchemeError
from hexflow.schemes import SchemeConfig, SchemeKind, Variant, make_scheme, u_from_f
from hexflow.topology import IdealTriangulation, build_triangulation


class InputError(HexflowError, ValueError):
    """A document is malformed; the message names the file and field."""


def _read_json(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputError(f"{path}: cannot read ({exc.strerror})") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def _field(doc, key, where, kind=None):
    if not isinstance(doc, dict) or key not in doc:
        raise InputError(f"{where}: missing field '{key}'")
    val = doc[key]
    if kind is not None and not isinstance(val, kind):
        raise InputError(f"{where}.{key}: expected {kind.__name__ if isinstance(kind, type) else 'list'}")
    return val


def _number(val, where):
    if isinstance(val, bool) or not isinstance(val, (int, float)) or not math.isfinite(val):
        raise InputError(f"{where}: expected a finite number, got {val!r}")
    return float(val)


def parse_surface(doc, where: str = "surface") -> tuple[IdealTriangulation, SchemeConfig]:
    """Build the triangulation and scheme described by a surface document.

    Raises
    ------
    InputError
        Malformed document, with the offending field named.
    TopologyError, SchemeError
        Well-formed document describing an invalid surface or weights.
    """
    if not isinstance(doc, dict):
        raise InputError(f"{where}: top level must be an object")
    scheme = _field(doc, "scheme", where, str)
    faces_raw = _field(doc, "faces", where, list)

    corners, labels = [], []
    for k, item in enumerate(faces_raw):
        at = f"{where}.faces[{k}]"
        if isinstance(item, dict):
            c = _field(item, "corners", at, list)
            e = item.get("edges")
            if e is not None and (not isinstance(e, list) or len(e) != 3):
                raise InputError(f"{at}.edges: expected three edge labels")
        else:
            c, e = item, None
        if not isinstance(c, list) or len(c) != 3 or not all(
            isinstance(v, int) and not isinstance(v, bool) for v in c
        ):
            raise InputError(f"{at}: expected three integer corners")
        corners.append(c)
        labels.append(e)
    if any(lab is not None for lab in labels) and any(lab is None for lab in labels):
        raise InputError(f"{where}.faces: give edge labels on every face or on none")
    face_edges = labels if labels and labels[0] is not None else None

    bnds = doc.get("boundaries")
    n = None
    alpha = None
    if bnds is not None:
        if not isinstance(bnds, list):
            raise InputError(f"{where}.boundaries: expected a list")
        n = len(bnds)
        alpha = [None] * n
        seen = set()
        for k, b in enumerate(bnds):
            at = f"{where}.boundaries[{k}]"
            bid = _field(b, "id", at)
            if not isinstance(bid, int) or not 0 <= bid < n or bid in seen:
                raise InputError(f"{at}.id: ids must be 0..{n - 1} without repeats")
            seen.add(bid)
            if "alpha" in b:
                alpha[bid] = _number(b["alpha"], f"{at}.alpha")

    tri = build_triangulation(corners, n_boundaries=n, face_edges=face_edges)
    kind = SchemeKind.parse(scheme)
    if alpha is not None:
        if all(a is None for a in alpha):
            alpha = None
        else:
            fill = -1.0 if kind.family == "circular" else 0.0
            alpha = [fill if a is None else a for a in alpha]

    eta = [None] * tri.n_edges
    variant = [Variant.PLUS] * tri.n_edges
    default_eta = doc.get("eta")
    if default_eta is not None:
        default_eta = _number(default_eta, f"{where}.eta")
    lookup = {(e.ends, e.label): e.id for e in tri.edges}
    edges_raw = doc.get("edges", [])
    if not isinstance(edges_raw, list):
        raise InputError(f"{where}.edges: expected a list")
    for k, item in enumerate(edges_raw):
        at = f"{where}.edges[{k}]"
        ends = _field(item, "ends", at, list)
        if len(ends) != 2:
            raise InputError(f"{at}.ends: expected two boundary ids")
        key = (tuple(sorted(int(v) for v in ends)), item.get("id"))
        if key not in lookup:
            raise InputError(f"{at}: no edge {key[0]}" + (f" with id {key[1]!r}" if key[1] is not None else "") + " in the faces")
        eid = lookup[key]
        if "eta" in item:
            eta[eid] = _number(item["eta"], f"{at}.eta")
        if "variant" in item:
            try:
                variant[eid] = Variant.parse(item["variant"])
            except SchemeError as exc:
                raise InputError(f"{at}.variant: {exc}") from None
    missing = [e for e in range(tri.n_edges) if eta[e] is None]
    if missing:
        if default_eta is None:
            e = tri.edges[missing[0]]
            raise InputError(f"{where}: no eta for edge {e.ends}" + (f" (id {e.label!r})" if e.label is not None else ""))
        for e in missing:
            eta[e] = default_eta
    sign = None
    if bnds is not None and any("sign" in b for b in bnds):
        sign = [1] * tri.n_boundaries
        for k, b in enumerate(bnds):
            if "sign" in b:
                sign[b["id"]] = int(_number(b["sign"], f"{where}.boundaries[{k}].sign"))
    cfg = make_scheme(kind, tri, eta, alpha=alpha, variant=variant, sign=sign)
    return tri, cfg


def load_surface(path) -> tuple[IdealTriangulation, SchemeConfig]:
    return parse_surface(_read_json(path), str(path))


def surface_document(tri: IdealTriangulation, cfg: SchemeConfig) -> dict:
    """Inverse of :func:`parse_surface`."""
    labelled = any(e.label is not None for e in tri.edges)
    faces = []
    for f in tri.faces:
        if labelled:
            faces.append({"corners": list(f.corners), "edges": [tri.edges[e].label for e in f.edges]})
        else:
            faces.append(list(f.corners))
    edges = []
    for e in tri.edges:
        item = {"ends": list(e.ends), "eta": float(cfg.eta[e.id])}
        if cfg.variant[e.id] != 1:
            item["variant"] = "MINUS"
        if e.label is not None:
            item["id"] = e.label
        edges.append(item)
    return {
        "scheme": cfg.kind.name,
        "boundaries": [{"id": i, "alpha": int(cfg.alpha[i])} for i in range(tri.n_boundaries)],
        "faces": faces,
        "edges": edges,
    }


def write_json(obj, path) -> None:
    Path(path).write_text(json.dumps(obj, indent=2) + "\n")


def parse_factors(doc, cfg: SchemeConfig, n: int, where: str = "factors") -> np.ndarray:
    """u-coordinates from a factor document (converting from f if needed)."""
    coords = _field(doc, "coords", where, str)
    if coords not in ("u", "f"):
        raise InputError(f"{where}.coords: expected 'u' or 'f', got {coords!r}")
    values = _field(doc, "values", where, list)
    if len(values) != n:
        raise InputError(f"{where}.values: expected {n} entries, got {len(values)}")
    vals = np.array([_number(v, f"{where}.values[{k}]") for k, v in enumerate(values)])
    if coords == "u":
        return vals
    try:
        return np.array([u_from_f(cfg, i, v) for i, v in enumerate(vals)])
    except DomainError as exc:
        raise InputError(f"{where}.values: {exc}") from None


def load_factors(path, cfg: SchemeConfig, n: int) -> np.ndarray:
    return parse_factors(_read_json(path), cfg, n, str(path))


def parse_target(doc, n: int, where: str = "target") -> np.ndarray:
    values = _field(doc, "K", where, list)
    if len(values) != n:
        raise InputError(f"{where}.K: expected {n} entries, got {len(values)}")
    K = np.array([_number(v, f"{where}.K[{k}]") for k, v in enumerate(values)])
    bad = np.flatnonzero(~(K > 0))
    if bad.size:
        raise InputError(f"{where}.K[{int(bad[0])}]: target curvature must be positive, got {K[bad[0]]!r}")
    return K


def load_target(path, n: int) -> np.ndarray:
    return parse_target(_read_json(path), n, str(path))


TRACE_FIXED = ["step", "t", "dt", "residual", "E", "C"]


def write_trace_csv(trace, path) -> None:
    """One row per accepted state: ``step,t,dt,residual,E,C,u_0..u_{N-1}``."""
    n = len(trace.u[0])
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(TRACE_FIXED + [f"u_{i}" for i in range(n)])
        for k in range(len(trace)):
            row = [trace.step[k]] + [
                repr(v) for v in (trace.t[k], trace.dt[k], trace.residual[k], trace.E[k], trace.C[k])
            ]
            w.writerow(row + [repr(float(v)) for v in trace.u[k]])


def read_trace_csv(path) -> dict[str, np.ndarray]:
    """Columns of a trace CSV; ``u`` is returned as an ``(rows, N)`` array."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    head, body = rows[0], rows[1:]
    if head[: len(TRACE_FIXED)] != TRACE_FIXED:
        raise InputError(f"{path}: not a trace file (header {head[:6]})")
    data = np.array([[float(v) for v in r] for r in body]).reshape(len(body), len(head))
    out = {name: data[:, k] for k, name in enumerate(TRACE_FIXED)}
    out["step"] = out["step"].astype(int)
    out["u"] = data[:, len(TRACE_FIXED):]
    return out
