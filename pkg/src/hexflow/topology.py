"""Combinatorics of ideally triangulated surfaces with boundary.

Boundary components play the role of vertices: a face is a hexagon whose
three alternate sides lie on three boundary components, and an ideal edge
joins two boundary components.  Only the incidence structure is stored
here; metric data lives in :mod:`hexflow.schemes` and :mod:`hexflow.hexagon`.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Hashable, Sequence

import numpy as np

from hexflow.errors import NonManifold, NotHyperbolic, RepeatedCorner, TopologyError


@dataclass(frozen=True)
class IdealEdge:
    id: int
    ends: tuple[int, int]
    label: Hashable = None

    def other(self, i: int) -> int:
        a, b = self.ends
        if i == a:
            return b
        if i == b:
            return a
        raise ValueError(f"boundary {i} is not an end of edge {self.id}")


@dataclass(frozen=True)
class HexFace:
    """One hexagonal face.

    ``edges[r]`` is the id of the ideal edge opposite ``corners[r]``, i.e.
    the edge joining the other two corners.
    """

    id: int
    corners: tuple[int, int, int]
    edges: tuple[int, int, int]


@dataclass(frozen=True, eq=False)
class IdealTriangulation:
    n_boundaries: int
    edges: tuple[IdealEdge, ...]
    faces: tuple[HexFace, ...]
    corner_index: dict = field(repr=False)

    def __post_init__(self):
        corners = np.array([f.corners for f in self.faces], dtype=np.intp).reshape(-1, 3)
        opposite = np.array([f.edges for f in self.faces], dtype=np.intp).reshape(-1, 3)
        ends = np.array([e.ends for e in self.edges], dtype=np.intp).reshape(-1, 2)
        for arr in (corners, opposite, ends):
            arr.setflags(write=False)
        object.__setattr__(self, "face_corners", corners)
        object.__setattr__(self, "face_edges", opposite)
        object.__setattr__(self, "edge_ends", ends)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def n_faces(self) -> int:
        return len(self.faces)

    @property
    def euler_characteristic(self) -> int:
        """Euler characteristic of the closed surface obtained by capping the boundary."""
        return self.n_boundaries - self.n_edges + self.n_faces

    @property
    def surface_euler_characteristic(self) -> int:
        """Euler characteristic of the surface with boundary itself."""
        return self.euler_characteristic - self.n_boundaries

    def corners_at(self, i: int) -> tuple[tuple[int, int], ...]:
        return corners_at(self, i)

    def face_list(self) -> list[list[int]]:
        return [list(f.corners) for f in self.faces]

    def adjacency(self) -> list[list[int]]:
        """Sorted neighbour lists (distinct boundary components joined by an edge)."""
        nbrs = [set() for _ in range(self.n_boundaries)]
        for e in self.edges:
            a, b = e.ends
            nbrs[a].add(b)
            nbrs[b].add(a)
        return [sorted(s) for s in nbrs]


def build_triangulation(
    faces: Sequence[Sequence[int]],
    n_boundaries: int | None = None,
    face_edges: Sequence[Sequence[Hashable]] | None = None,
) -> IdealTriangulation:
    """Build and validate an ideal triangulation from corner triples.

    Parameters
    ----------
    faces : sequence of int triples
        Boundary components at the corners of each hexagon.
    n_boundaries : int, optional
        Number of boundary components.  Defaults to ``max index + 1``.
    face_edges : sequence of label triples, optional
        Explicit edge identities, needed only when two boundary components are
        joined by more than one edge.  ``face_edges[f][r]`` labels the edge
        opposite corner ``r`` of face ``f``.  Without it, every unordered pair
        of corners names a single edge.

    Returns
    -------
    IdealTriangulation
        Edge ids follow the lexicographic order of ``(ends, label)``; corner
        order inside each face is kept as given.

    Raises
    ------
    RepeatedCorner
        A face has two equal corners.
    NonManifold
        Some edge borders a number of faces other than two.
    NotHyperbolic
        ``chi - N >= 0`` for the closed-surface Euler characteristic ``chi``.
    """
    triples = [tuple(int(c) for c in f) for f in faces]
    if not triples:
        raise TopologyError("a triangulation needs at least one face")
    for fid, t in enumerate(triples):
        if len(t) != 3:
            raise TopologyError(f"face {fid} has {len(t)} corners, expected 3")
        if len(set(t)) != 3:
            raise RepeatedCorner(f"face {fid} has repeated corners {list(t)}")
        if min(t) < 0:
            raise TopologyError(f"face {fid} has a negative boundary index")

    n = max(max(t) for t in triples) + 1 if n_boundaries is None else int(n_boundaries)
    if any(max(t) >= n for t in triples):
        raise TopologyError(f"boundary index out of range [0, {n})")
    if face_edges is not None and len(face_edges) != len(triples):
        raise TopologyError("face_edges must have one entry per face")

    # key -> list of (face, slot); key is (ends, label)
    uses = defaultdict(list)
    for fid, t in enumerate(triples):
        for r in range(3):
            a, b = sorted((t[(r + 1) % 3], t[(r + 2) % 3]))
            label = None if face_edges is None else face_edges[fid][r]
            uses[((a, b), label)].append((fid, r))

    bad = [(k, v) for k, v in uses.items() if len(v) != 2]
    if bad:
        (ends, label), occ = bad[0]
        what = f"edge {ends}" if label is None else f"edge {ends} (label {label!r})"
        raise NonManifold(f"{what} borders {len(occ)} face(s), expected 2")

    keys = sorted(uses, key=lambda k: (k[0], _label_key(k[1])))
    edge_id = {k: eid for eid, k in enumerate(keys)}
    edges = tuple(IdealEdge(eid, k[0], k[1]) for eid, k in enumerate(keys))

    hexes = []
    for fid, t in enumerate(triples):
        opp = []
        for r in range(3):
            a, b = sorted((t[(r + 1) % 3], t[(r + 2) % 3]))
            label = None if face_edges is None else face_edges[fid][r]
            opp.append(edge_id[((a, b), label)])
        hexes.append(HexFace(fid, t, tuple(opp)))

    index = {i: [] for i in range(n)}
    for f in hexes:
        for r, c in enumerate(f.corners):
            index[c].append((f.id, r))
    lonely = [i for i, v in index.items() if not v]
    if lonely:
        raise TopologyError(f"boundary component(s) {lonely} belong to no face")
    index = {i: tuple(v) for i, v in index.items()}

    tri = IdealTriangulation(n, edges, tuple(hexes), index)
    if tri.surface_euler_characteristic >= 0:
        raise NotHyperbolic(
            f"chi - N = {tri.surface_euler_characteristic} >= 0; "
            "the surface with boundary admits no hyperbolic metric"
        )
    return tri


def _label_key(label):
    return (label is not None, str(type(label)), str(label))


def corners_at(tri: IdealTriangulation, i: int) -> tuple[tuple[int, int], ...]:
    """All ``(face id, corner slot)`` pairs at boundary ``i`` in ascending order."""
    if not 0 <= i < tri.n_boundaries:
        raise IndexError(f"boundary {i} out of range [0, {tri.n_boundaries})")
    return tri.corner_index[i]
