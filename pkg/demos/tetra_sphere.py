"""Prescribing boundary lengths on the tetra-sphere.

Four boundary components, six ideal edges, four hexagons: the smallest
ideally triangulated surface (a sphere with four discs removed).  With the
DCS1 length law at eta = 3 and every factor at u = -1, each hexagon is
equilateral with cosh l = 2, and then every boundary arc equals l as well.

The script checks that point, then solves for an uneven target with all
three solvers from the same random start and compares the answers.

    python3 demos/tetra_sphere.py
"""

import math

import numpy as np

from hexflow import SolverConfig, curvature_K, laplacian, make_scheme, sample_admissible, solve
from hexflow.curvature import corner_angles, edge_lengths
from hexflow.fixtures import tetra_sphere
from hexflow.numerics import max_eigenvalue


def main():
    tri = tetra_sphere()
    cfg = make_scheme("DCS1", tri, 3.0)
    u_eq = -np.ones(4)

    l = edge_lengths(cfg, tri, u_eq)
    theta = corner_angles(cfg, tri, u_eq)
    print("equilateral point u = -1")
    print(f"  edge lengths     {l[0]:.12f}  (arccosh 2 = {math.acosh(2.0):.12f})")
    print(f"  boundary arcs    {theta[0, 0]:.12f}")
    print(f"  curvature K_i    {curvature_K(cfg, tri, u_eq)[0]:.12f}  (3 arccosh 2)")
    L = laplacian(cfg, tri, u_eq)
    print(f"  Laplacian        diag {L.toarray()[0, 0]:.6f}, off {L.toarray()[0, 1]:.6f}, max eig {max_eigenvalue(L):.6f}")

    Kbar = np.array([3.5, 4.0, 4.2, 3.8])
    u0 = sample_admissible(cfg, tri, np.random.default_rng(7))
    print(f"\ntarget {Kbar.tolist()} from u0 = {np.round(u0, 4).tolist()}")
    print(f"  {'method':8s} {'steps':>6s} {'t':>9s} {'residual':>10s}  u_final")
    finals = {}
    for method in ("ricci", "calabi", "newton"):
        tr = solve(cfg, tri, u0, Kbar, SolverConfig(method=method))
        finals[method] = tr.u_final
        print(f"  {method:8s} {tr.n_steps:6d} {tr.t[-1]:9.3f} {tr.final_residual:10.2e}  {np.round(tr.u_final, 9).tolist()}")
    gap = max(np.max(np.abs(finals[m] - finals["newton"])) for m in finals)
    print(f"  largest disagreement between methods: {gap:.1e}")

    # Ricci flow shrinks E, Calabi flow shrinks C = |K - Kbar|^2 / 2; both
    # decrease along either flow
    tr = solve(cfg, tri, u0, Kbar, SolverConfig(method="calabi"))
    print("\nCalabi flow, every tenth accepted step")
    print(f"  {'step':>5s} {'t':>8s} {'E':>12s} {'C':>12s}")
    for k in range(0, len(tr), 10):
        print(f"  {tr.step[k]:5d} {tr.t[k]:8.3f} {tr.E[k]:12.6f} {tr.C[k]:12.3e}")


if __name__ == "__main__":
    main()
