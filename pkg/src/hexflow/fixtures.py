"""Small reference surfaces used by the tests, demos and CLI examples."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from hexflow.curvature import curvature_K
from hexflow.schemes import SchemeConfig, make_scheme
from hexflow.topology import IdealTriangulation, build_triangulation

# boundary of a tetrahedron: closed surface chi = 2, four boundary components
TETRA_FACES = [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]]

OCTA_FACES = [
    [0, 1, 2], [0, 2, 3], [0, 3, 4], [0, 4, 1],
    [5, 2, 1], [5, 3, 2], [5, 4, 3], [5, 1, 4],
]

# two hexagons glued along all three edges: a pair of pants
PANTS_FACES = [[0, 1, 2], [0, 1, 2]]

# K_i at the equilateral DCS1 point, three corners with cosh theta = 2
TETRA_DCS1_K = 3.0 * math.acosh(2.0)


def tetra_sphere() -> IdealTriangulation:
    return build_triangulation(TETRA_FACES)


def octahedron() -> IdealTriangulation:
    return build_triangulation(OCTA_FACES)


def pants() -> IdealTriangulation:
    return build_triangulation(PANTS_FACES)


def star_variants(tri: IdealTriangulation, centre: int = 0) -> list[int]:
    """MINUS on every edge at ``centre``, PLUS elsewhere."""
    return [-1 if centre in e.ends else 1 for e in tri.edges]


@dataclass(frozen=True, eq=False)
class Fixture:
    """A scheme on a surface together with a reference point ``u_star``."""

    name: str
    tri: IdealTriangulation
    cfg: SchemeConfig
    u_star: np.ndarray

    @property
    def Kbar(self) -> np.ndarray:
        return curvature_K(self.cfg, self.tri, self.u_star)


def dcs1_tetra(eta: float = 3.0) -> Fixture:
    """DCS1 on the tetra-sphere; at ``u = -1`` (``f = 0``) every hexagon is
    equilateral with ``cosh l = eta - 1``."""
    tri = tetra_sphere()
    return Fixture("dcs1-tetra", tri, make_scheme("DCS1", tri, eta), -np.ones(4))


def dcs3_tetra(alpha: int = 0, eta: float = 2.0) -> Fixture:
    """DCS3 on the tetra-sphere at the point where every hexagon is
    equilateral with ``cosh l = 2`` (for ``alpha = 1`` this needs ``eta > 1``)."""
    tri = tetra_sphere()
    cfg = make_scheme("DCS3", tri, eta, alpha=alpha)
    # eta e^{2f} - sqrt(1 + alpha e^{2f})^2 = 2
    f = 0.5 * math.log(3.0 / (eta - alpha))
    return Fixture(f"dcs3-alpha{alpha}-tetra", tri, cfg, cfg.u_from_f(np.full(4, f)))


def local_fixtures() -> dict[str, Fixture]:
    """Fixtures for the schemes with only local convergence results.

    The mixed schemes use MINUS edges around boundary 0, so boundary 0 has
    chart sign -1.  The points ``u_star`` were chosen where the global
    Laplacian is negative definite for NEW1, MIXED2 and MIXED3.  No such
    point exists for MIXED1 on this surface; there ``u_star`` is a saddle of
    the Ricci energy.
    """
    tri = tetra_sphere()
    star = star_variants(tri)
    out = {}

    def add(name, kind, eta, u, variant=None):
        cfg = make_scheme(kind, tri, eta, variant=variant)
        out[name] = Fixture(name, tri, cfg, np.array(u, dtype=float))

    add("NEW1", "NEW1", 0.0, [-0.3, -0.4, -0.5, -0.6])
    add("NEW1-neg", "NEW1", -0.5, [-0.2, -0.25, -0.15, -0.3])
    add("MIXED1", "MIXED1", 2.0, [-0.5, 0.2, 0.1, 0.3], star)
    add("MIXED2", "MIXED2", 1.0, [1.2, -0.1, -0.1, -0.1], star)
    add("MIXED3", "MIXED3", 1.0, [2.5, -0.05, -0.05, -0.05], star)
    return out
