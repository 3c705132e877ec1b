"""What happens near the edge of the admissible space.

Two ways for a hexagon to degenerate, both on the DCS1 tetra-sphere:

* an ideal edge shrinks to length zero: the arcs at both of its ends grow
  without bound, at least like arccosh(coth l);
* one conformal factor runs off to +infinity: every arc at that boundary
  component decays to zero, so its curvature does too.

A third effect is specific to the MIXED2 law at eta = 1: a MINUS edge
between boundaries i and j has length zero exactly where |u_i| = |u_j|,
so the admissible space falls apart into chambers and a straight segment
between two admissible points can pass through a degenerate edge.

    python3 demos/degenerations.py
"""

import math

import numpy as np

from hexflow import curvature_K, make_scheme
from hexflow.curvature import corner_angles, edge_lengths
from hexflow.fixtures import star_variants, tetra_sphere


def shrinking_edge(cfg, tri):
    print("edge (0, 1) shrinking, f_2 = f_3 = 0")
    print(f"  {'l_01':>9s} {'K_0':>9s} {'arccosh coth l':>15s}")
    for l in (1.0, 1e-1, 1e-2, 1e-3, 1e-4, 1e-6):
        # eta e^{2f} - 1 = cosh l on a PLUS edge with equal factors
        f = 0.5 * math.log((math.cosh(l) + 1.0) / 3.0)
        u = cfg.u_from_f(np.array([f, f, 0.0, 0.0]))
        K = curvature_K(cfg, tri, u)
        print(f"  {edge_lengths(cfg, tri, u)[0]:9.1e} {K[0]:9.4f} {math.acosh(1.0 / math.tanh(l)):15.4f}")


def runaway_factor(cfg, tri):
    print("\nf_0 growing, the others at 0")
    print(f"  {'f_0':>5s} {'max arc at 0':>13s} {'K_0':>10s}")
    for f0 in (0.0, 5.0, 10.0, 20.0, 50.0, 300.0):
        u = cfg.u_from_f(np.array([f0, 0.0, 0.0, 0.0]))
        th = corner_angles(cfg, tri, u)
        at0 = max(th[f.id, r] for f in tri.faces for r, c in enumerate(f.corners) if c == 0)
        print(f"  {f0:5.0f} {at0:13.3e} {curvature_K(cfg, tri, u)[0]:10.3e}")


def mixed2_walls(tri):
    cfg = make_scheme("MIXED2", tri, 1.0, variant=star_variants(tri))
    print("\nMIXED2, eta = 1, MINUS edges around boundary 0")
    print(f"  {'u_0 + u_2':>10s} {'l_02':>10s}")
    for gap in (0.3, 1e-2, 1e-4, 1e-6, -1e-4, -1e-2):
        u = np.array([0.6, -0.1, -0.6 + gap, -1.0])
        print(f"  {gap:10.0e} {edge_lengths(cfg, tri, u)[1]:10.3e}")
    print("  the length is ~|u_0 + u_2| on both sides: the wall is touched, never crossed")


def main():
    tri = tetra_sphere()
    cfg = make_scheme("DCS1", tri, 3.0)
    shrinking_edge(cfg, tri)
    runaway_factor(cfg, tri)
    mixed2_walls(tri)


if __name__ == "__main__":
    main()
