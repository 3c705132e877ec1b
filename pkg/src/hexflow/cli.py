"""Command-line entry point.

    hexflow validate  SURFACE
    hexflow curvature SURFACE FACTORS [--json]
    hexflow flow      SURFACE TARGET [--method ricci|calabi|newton] [--start random|FILE] ...
    hexflow check     SURFACE FACTORS [--h 1e-5]

Exit codes: 0 success, 1 invalid input or failed check, 2 solver hit
``--max-steps``, 3 factors not admissible or the run left the admissible
region.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from hexflow.curvature import corner_angles, curvature_K, edge_lengths, laplacian
from hexflow.errors import (
    CapabilityError,
    HexflowError,
    LinearSolveFailure,
    NotAdmissible,
    SchemeError,
    TopologyError,
)
from hexflow.flows import Method, Outcome, SolverConfig, solve
from hexflow.hexagon import a_quantity
from hexflow.io import InputError, load_factors, load_surface, load_target, write_json, write_trace_csv
from hexflow.numerics import fd_jacobian, max_eigenvalue
from hexflow.schemes import SchemeKind, admissible, sample_admissible

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_MAX_STEPS = 2
EXIT_INADMISSIBLE = 3

# tolerances used by `check`
SYMMETRY_TOL = 1e-9
FD_TOL = 1e-6
A_TOL = 1e-10


def _err(msg):
    print(f"error: {msg}", file=sys.stderr)


def _surface(path):
    try:
        return load_surface(path)
    except (InputError, TopologyError, SchemeError) as exc:
        _err(exc)
        return None


def _inadmissible(tri, rep):
    _err("factors are not admissible: " + rep.describe(tri))
    for e in rep.bad_edges:
        print(f"inadmissible edge {e} {tri.edges[e].ends}")
    for i in rep.bad_boundaries:
        print(f"factor outside chart at boundary {i}")
    return EXIT_INADMISSIBLE


def cmd_validate(args) -> int:
    loaded = _surface(args.surface)
    if loaded is None:
        return EXIT_INVALID
    tri, cfg = loaded
    chi = tri.euler_characteristic
    print(f"N={tri.n_boundaries} |E|={tri.n_edges} |F|={tri.n_faces} chi={chi}")
    print(f"chi(Sigma)={tri.surface_euler_characteristic}")
    print(f"scheme {cfg.kind.name}: weights ok")
    if cfg.kind is SchemeKind.DCS3:
        print("eta_ij > alpha_i alpha_j on every edge: ok")
    if cfg.kind.mixed:
        minus = int(np.sum(cfg.variant < 0))
        print(f"MINUS edges: {minus}; chart signs {cfg.sign.astype(int).tolist()}")
    try:
        cfg.require_solvable()
        print("solvable: yes (" + ("global" if cfg.global_convergence else "local") + " convergence)")
    except CapabilityError as exc:
        print(f"solvable: no ({exc})")
    return EXIT_OK


def cmd_curvature(args) -> int:
    loaded = _surface(args.surface)
    if loaded is None:
        return EXIT_INVALID
    tri, cfg = loaded
    try:
        u = load_factors(args.factors, cfg, tri.n_boundaries)
    except InputError as exc:
        _err(exc)
        return EXIT_INVALID
    rep = admissible(cfg, tri, u)
    if not rep:
        return _inadmissible(tri, rep)
    K = curvature_K(cfg, tri, u)
    lengths = edge_lengths(cfg, tri, u)
    theta = corner_angles(cfg, tri, u)
    if args.json:
        doc = {
            "u": u.tolist(),
            "f": cfg.f_from_u(u).tolist(),
            "K": K.tolist(),
            "edges": [{"id": e.id, "ends": list(e.ends), "length": float(lengths[e.id])} for e in tri.edges],
            "corners": [
                {"face": f.id, "boundary": c, "theta": float(theta[f.id, r])}
                for f in tri.faces
                for r, c in enumerate(f.corners)
            ],
            "admissible": True,
        }
        print(json.dumps(doc, indent=2))
        return EXIT_OK
    print("admissible: yes")
    for i, k in enumerate(K):
        print(f"K[{i}] = {k:.12g}")
    for e in tri.edges:
        print(f"l{e.ends} = {lengths[e.id]:.12g}")
    for f in tri.faces:
        for r, c in enumerate(f.corners):
            print(f"theta[face {f.id}, boundary {c}] = {theta[f.id, r]:.12g}")
    return EXIT_OK


def _report(tri, cfg, trace, wall, seed, start):
    u = trace.u_final
    K = curvature_K(cfg, tri, u)
    diag = {"min_edge_length": float(np.min(edge_lengths(cfg, tri, u)))}
    try:
        L = laplacian(cfg, tri, u, strict=False)
        diag["laplacian_asymmetry"] = L.asymmetry
        diag["max_eigenvalue"] = max_eigenvalue(L)
    except HexflowError as exc:
        diag["laplacian_error"] = str(exc)
    return {
        "method": trace.method.value,
        "outcome": trace.outcome.value,
        "message": trace.message,
        "steps": trace.n_steps,
        "rejected_steps": trace.rejected,
        "t": trace.t[-1],
        "residual": trace.final_residual,
        "u": u.tolist(),
        "f": cfg.f_from_u(u).tolist(),
        "K": K.tolist(),
        "Kbar": trace.Kbar.tolist(),
        "E": trace.E[-1],
        "C": trace.C[-1],
        "wall_time": wall,
        "start": start,
        "seed": seed,
        "diagnostics": diag,
        "warnings": trace.warnings,
    }


_EXIT_FOR = {
    Outcome.CONVERGED: EXIT_OK,
    Outcome.MAX_STEPS: EXIT_MAX_STEPS,
    Outcome.LEFT_ADMISSIBLE: EXIT_INADMISSIBLE,
}


def cmd_flow(args) -> int:
    loaded = _surface(args.surface)
    if loaded is None:
        return EXIT_INVALID
    tri, cfg = loaded
    try:
        Kbar = load_target(args.target, tri.n_boundaries)
        solver = SolverConfig(
            method=Method.parse(args.method),
            tol=args.tol,
            dt0=args.dt0,
            max_steps=args.max_steps,
        )
        cfg.require_solvable()
    except (InputError, ValueError, CapabilityError) as exc:
        _err(exc)
        return EXIT_INVALID

    if args.start == "random":
        rng = np.random.default_rng(args.seed)
        try:
            u0 = sample_admissible(cfg, tri, rng)
        except NotAdmissible as exc:
            _err(exc)
            return EXIT_INADMISSIBLE
    else:
        try:
            u0 = load_factors(args.start, cfg, tri.n_boundaries)
        except InputError as exc:
            _err(exc)
            return EXIT_INVALID
        rep = admissible(cfg, tri, u0)
        if not rep:
            return _inadmissible(tri, rep)

    t0 = time.perf_counter()
    try:
        trace = solve(cfg, tri, u0, Kbar, solver)
    except LinearSolveFailure as exc:
        _err(f"linear solve failed: {exc}")
        return EXIT_INVALID
    wall = time.perf_counter() - t0

    report = _report(tri, cfg, trace, wall, args.seed, args.start)
    if args.trace:
        write_trace_csv(trace, args.trace)
    if args.report:
        write_json(report, args.report)
    print(f"outcome: {trace.outcome.value}")
    if trace.message:
        print(f"message: {trace.message}")
    print(f"steps: {trace.n_steps}  residual: {trace.final_residual:.3e}  time: {wall:.3f}s")
    print("u = " + " ".join(f"{v:.12g}" for v in trace.u_final))
    for w in trace.warnings:
        print(f"warning: {w}")
    return _EXIT_FOR[trace.outcome]


def _a_residual(cfg, tri, u):
    """Worst relative spread of ``sinh l_r sinh l_s sinh theta_t`` over the
    three labellings of each face, against the symmetric closed form."""
    lengths = edge_lengths(cfg, tri, u)
    theta = corner_angles(cfg, tri, u)
    worst = 0.0
    for f in tri.faces:
        ls = lengths[list(f.edges)]
        ref = a_quantity(*ls)
        for t in range(3):
            r, s = (t + 1) % 3, (t + 2) % 3
            val = np.sinh(ls[r]) * np.sinh(ls[s]) * np.sinh(theta[f.id, t])
            worst = max(worst, abs(val - ref) / ref)
    return worst


def cmd_check(args) -> int:
    loaded = _surface(args.surface)
    if loaded is None:
        return EXIT_INVALID
    tri, cfg = loaded
    try:
        u = load_factors(args.factors, cfg, tri.n_boundaries)
    except InputError as exc:
        _err(exc)
        return EXIT_INVALID
    rep = admissible(cfg, tri, u)
    if not rep:
        return _inadmissible(tri, rep)
    L = laplacian(cfg, tri, u, strict=False)
    lam = max_eigenvalue(L)
    try:
        fd = fd_jacobian(lambda x: curvature_K(cfg, tri, x), u, args.h)
    except NotAdmissible as exc:
        _err(f"finite-difference stencil leaves the admissible region: {exc}")
        return EXIT_INADMISSIBLE
    dense = L.toarray()
    fd_err = float(np.max(np.abs(fd - dense)) / np.max(np.abs(dense)))
    a_res = _a_residual(cfg, tri, u)

    checks = [
        ("symmetry residual", L.asymmetry, L.asymmetry <= SYMMETRY_TOL, f"<= {SYMMETRY_TOL:g}"),
        ("max eigenvalue", lam, lam < 0, "< 0"),
        ("finite-difference error", fd_err, fd_err <= FD_TOL, f"<= {FD_TOL:g}"),
        ("A permutation residual", a_res, a_res <= A_TOL, f"<= {A_TOL:g}"),
    ]
    ok = True
    for name, val, good, bound in checks:
        print(f"{name}: {val:.3e} ({bound}) {'ok' if good else 'FAIL'}")
        ok &= bool(good)
    return EXIT_OK if ok else EXIT_INVALID


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hexflow", description="Prescribed boundary lengths on ideally triangulated surfaces.")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="check a surface document")
    v.add_argument("surface")
    v.set_defaults(func=cmd_validate)

    c = sub.add_parser("curvature", help="report K, edge lengths and arcs at given factors")
    c.add_argument("surface")
    c.add_argument("factors")
    c.add_argument("--json", action="store_true", help="print a JSON document")
    c.set_defaults(func=cmd_curvature)

    f = sub.add_parser("flow", help="solve for a target curvature")
    f.add_argument("surface")
    f.add_argument("target")
    f.add_argument("--method", default="ricci", choices=[m.value for m in Method])
    f.add_argument("--tol", type=float, default=1e-10)
    f.add_argument("--dt0", type=float, default=0.1)
    f.add_argument("--max-steps", type=int, default=100_000)
    f.add_argument("--seed", type=int, default=0, help="seed for --start random")
    f.add_argument("--start", default="random", help="'random' or a factors file")
    f.add_argument("--trace", help="write the trace CSV here")
    f.add_argument("--report", help="write the run report JSON here")
    f.set_defaults(func=cmd_flow)

    k = sub.add_parser("check", help="self-check the Laplacian at given factors")
    k.add_argument("surface")
    k.add_argument("factors")
    k.add_argument("--h", type=float, default=1e-5, help="finite-difference step")
    k.set_defaults(func=cmd_check)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
