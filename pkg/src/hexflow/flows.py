"""Prescribed-curvature solvers.

Three drivers share one trace format:

* Ricci flow ``du/dt = K - Kbar``, the negative gradient flow of ``E``;
* Calabi flow ``du/dt = -Delta (K - Kbar)``, the negative gradient flow of ``C``;
* damped Newton on ``E``, whose Hessian is ``-Delta``.

The flows use classical RK4 with step control by backtracking.  A step is
retried with a smaller ``dt`` when any stage leaves the admissible region or
when it would increase the energy that the flow is meant to decrease.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from hexflow.curvature import (
    curvature_and_laplacian,
    curvature_batch,
    curvature_K,
    laplacian,
    segment_energy,
)
from hexflow.errors import (
    NotAdmissible,
    PathLeavesAdmissible,
    QuadratureNoConvergence,
    SchemeError,
)
from hexflow.numerics import cg_solve
from hexflow.schemes import SchemeConfig, SchemeKind, admissible
from hexflow.topology import IdealTriangulation


class Method(enum.Enum):
    RICCI = "ricci"
    CALABI = "calabi"
    NEWTON = "newton"

    @classmethod
    def parse(cls, name) -> "Method":
        if isinstance(name, cls):
            return name
        try:
            return cls(str(name).lower())
        except ValueError:
            raise ValueError(f"unknown method {name!r}; expected ricci, calabi or newton") from None


class Outcome(enum.Enum):
    CONVERGED = "CONVERGED"
    MAX_STEPS = "MAX_STEPS"
    LEFT_ADMISSIBLE = "LEFT_ADMISSIBLE"


@dataclass(frozen=True)
class SolverConfig:
    """Solver settings.

    Attributes
    ----------
    method : Method
    tol : float
        Stop once ``max |K - Kbar| <= tol``.
    dt0 : float
        Initial step; accepted steps grow by ``grow`` up to ``10 dt0``.
    max_steps : int
        Accepted steps (Newton iterations) before giving up.
    shrink, grow : float
        Backtracking and growth factors.
    dt_min : float
        Steps below ``dt_min * dt0`` end the run.
    monotone : {"auto", "both", "own"}
        Energies a step may not increase.  ``"own"`` guards only the flow's
        own energy (``E`` for Ricci, ``C`` for Calabi); ``"both"`` guards
        ``E`` and ``C``; ``"auto"`` picks ``"both"`` when the scheme has a
        negative definite Laplacian everywhere and ``"own"`` otherwise.
    """

    method: Method = Method.RICCI
    tol: float = 1e-10
    dt0: float = 0.1
    max_steps: int = 100_000
    shrink: float = 0.5
    grow: float = 1.2
    dt_min: float = 1e-12
    monotone: str = "auto"

    def __post_init__(self):
        object.__setattr__(self, "method", Method.parse(self.method))
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if not self.dt0 > 0:
            raise ValueError("dt0 must be positive")
        if not 0 < self.shrink < 1 < self.grow:
            raise ValueError("need 0 < shrink < 1 < grow")
        if self.max_steps < 0:
            raise ValueError("max_steps must be nonnegative")
        if self.monotone not in ("auto", "both", "own"):
            raise ValueError("monotone must be 'auto', 'both' or 'own'")


@dataclass
class FlowTrace:
    """Accepted states of one solver run.

    Row ``0`` is the start (``dt = 0``).  ``E`` is anchored at the start.
    """

    method: Method
    Kbar: np.ndarray
    step: list = field(default_factory=list)
    t: list = field(default_factory=list)
    dt: list = field(default_factory=list)
    residual: list = field(default_factory=list)
    E: list = field(default_factory=list)
    C: list = field(default_factory=list)
    u: list = field(default_factory=list)
    outcome: Outcome = Outcome.MAX_STEPS
    message: str = ""
    warnings: list = field(default_factory=list)
    rejected: int = 0

    def append(self, step, t, dt, residual, E, C, u):
        self.step.append(int(step))
        self.t.append(float(t))
        self.dt.append(float(dt))
        self.residual.append(float(residual))
        self.E.append(float(E))
        self.C.append(float(C))
        self.u.append(np.array(u, dtype=float))

    def __len__(self):
        return len(self.step)

    @property
    def n_steps(self) -> int:
        return self.step[-1]

    @property
    def u_final(self) -> np.ndarray:
        return self.u[-1]

    @property
    def final_residual(self) -> float:
        return self.residual[-1]

    @property
    def converged(self) -> bool:
        return self.outcome is Outcome.CONVERGED

    def u_matrix(self) -> np.ndarray:
        return np.array(self.u)


def _validate(cfg, tri, u0, Kbar):
    cfg.require_solvable()
    u0 = np.asarray(u0, dtype=float)
    Kbar = np.asarray(Kbar, dtype=float)
    n = tri.n_boundaries
    if u0.shape != (n,) or Kbar.shape != (n,):
        raise ValueError(f"u0 and Kbar need {n} entries")
    if not np.all(Kbar > 0) or not np.all(np.isfinite(Kbar)):
        raise SchemeError("target curvature must be positive and finite")
    rep = admissible(cfg, tri, u0)
    if not rep:
        raise NotAdmissible("start point is not admissible: " + rep.describe(tri), rep.bad_edges, rep.bad_boundaries)
    return u0.copy(), Kbar.copy()


def _guard(solver, cfg, method):
    mode = solver.monotone
    if mode == "auto":
        mode = "both" if cfg.global_convergence else "own"
    if mode == "both":
        return True, True
    return method is Method.RICCI, method is Method.CALABI


_BOUNDARY_AT_ZERO = (SchemeKind.DCS1, SchemeKind.DCS3)


def _near_zero_warning(cfg, u, trace):
    if cfg.kind not in _BOUNDARY_AT_ZERO or trace.warnings:
        return
    near = np.abs(u) < 1e-8
    if cfg.kind is SchemeKind.DCS3:
        near &= cfg.alpha == 1
    if near.any():
        trace.warnings.append(f"factor within 1e-8 of the chart boundary at {np.flatnonzero(near).tolist()}")


def _vector_field(method, cfg, tri, Kbar):
    if method is Method.RICCI:

        def field_(u):
            K = curvature_batch(cfg, tri, u)
            if not np.all(np.isfinite(K)):
                return None
            return K - Kbar

    else:

        def field_(u):
            state = curvature_and_laplacian(cfg, tri, u)
            if state is None:
                return None
            K, L = state
            return -L.matvec(K - Kbar)

    return field_


def _run_flow(method, cfg, tri, u0, Kbar, solver):
    u, Kbar = _validate(cfg, tri, u0, Kbar)
    solver = solver or SolverConfig(method=method)
    guard_E, guard_C = _guard(solver, cfg, method)
    rhs = _vector_field(method, cfg, tri, Kbar)
    trace = FlowTrace(method, Kbar)

    K = curvature_K(cfg, tri, u)
    r = K - Kbar
    C = 0.5 * float(r @ r)
    E = 0.0
    t = 0.0
    trace.append(0, t, 0.0, np.max(np.abs(r)), E, C, u)
    dt = solver.dt0
    dt_cap = 10.0 * solver.dt0
    dt_floor = solver.dt_min * solver.dt0
    step = 0
    while True:
        if np.max(np.abs(r)) <= solver.tol:
            trace.outcome = Outcome.CONVERGED
            return trace
        if step >= solver.max_steps:
            trace.outcome = Outcome.MAX_STEPS
            trace.message = f"no convergence within {solver.max_steps} steps"
            return trace
        cause = None
        new = _rk4(rhs, u, dt)
        if new is None:
            cause = "admissibility"
        else:
            K_new = curvature_batch(cfg, tri, new)
            try:
                dE = segment_energy(cfg, tri, u, new, Kbar, max_level=8)
            except PathLeavesAdmissible:
                cause = "admissibility"
            except QuadratureNoConvergence:
                cause = "quadrature"
            if cause is None and not np.all(np.isfinite(K_new)):
                cause = "admissibility"
            if cause is None:
                r_new = K_new - Kbar
                C_new = 0.5 * float(r_new @ r_new)
                if (guard_E and dE > 0) or (guard_C and C_new > C):
                    cause = "monotonicity"
        if cause is not None:
            trace.rejected += 1
            dt *= solver.shrink
            if dt < dt_floor:
                if cause == "admissibility":
                    trace.outcome = Outcome.LEFT_ADMISSIBLE
                    trace.message = "step size underflow: every step leaves the admissible region"
                elif cause == "quadrature":
                    trace.outcome = Outcome.LEFT_ADMISSIBLE
                    trace.message = "step size underflow: energy integral unresolved near the boundary"
                else:
                    trace.outcome = Outcome.MAX_STEPS
                    trace.message = "step size underflow: no step decreases the energy"
                return trace
            continue
        step += 1
        t += dt
        u, r, C, E = new, r_new, C_new, E + dE
        trace.append(step, t, dt, np.max(np.abs(r)), E, C, u)
        _near_zero_warning(cfg, u, trace)
        dt = min(dt * solver.grow, dt_cap)


def _rk4(rhs, u, dt):
    try:
        k1 = rhs(u)
        if k1 is None:
            return None
        k2 = rhs(u + 0.5 * dt * k1)
        if k2 is None:
            return None
        k3 = rhs(u + 0.5 * dt * k2)
        if k3 is None:
            return None
        k4 = rhs(u + dt * k3)
        if k4 is None:
            return None
    except NotAdmissible:
        return None
    return u + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def flow_ricci(
    cfg: SchemeConfig, tri: IdealTriangulation, u0, Kbar, solver: SolverConfig | None = None
) -> FlowTrace:
    """Combinatorial Ricci flow ``du/dt = K - Kbar`` from ``u0``.

    Non-convergence is reported through ``trace.outcome``.

    Raises
    ------
    NotAdmissible
        ``u0`` is not admissible.
    CapabilityError
        The scheme is supported for evaluation only.
    """
    return _run_flow(Method.RICCI, cfg, tri, u0, Kbar, solver)


def flow_calabi(
    cfg: SchemeConfig, tri: IdealTriangulation, u0, Kbar, solver: SolverConfig | None = None
) -> FlowTrace:
    """Combinatorial Calabi flow ``du/dt = -Delta (K - Kbar)`` from ``u0``.

    ``Delta`` is reassembled at every Runge-Kutta stage.  Errors as for
    :func:`flow_ricci`.
    """
    return _run_flow(Method.CALABI, cfg, tri, u0, Kbar, solver)


def newton_solve(
    cfg: SchemeConfig, tri: IdealTriangulation, u0, Kbar, solver: SolverConfig | None = None
) -> FlowTrace:
    """Damped Newton iteration on the Ricci energy.

    Each iteration solves ``(-Delta) delta = K - Kbar`` by conjugate
    gradients and moves to ``u + lam delta``, halving ``lam`` from 1 while the
    trial point is inadmissible or ``E`` would increase.  The trace column
    ``t`` is the running sum of accepted ``lam``.

    Raises
    ------
    NotAdmissible
    LinearSolveFailure
        ``-Delta`` is not positive definite at some iterate.
    """
    u, Kbar = _validate(cfg, tri, u0, Kbar)
    solver = solver or SolverConfig(method=Method.NEWTON)
    trace = FlowTrace(Method.NEWTON, Kbar)
    r = curvature_K(cfg, tri, u) - Kbar
    E, t = 0.0, 0.0
    trace.append(0, t, 0.0, np.max(np.abs(r)), E, 0.5 * float(r @ r), u)
    step = 0
    while True:
        if np.max(np.abs(r)) <= solver.tol:
            trace.outcome = Outcome.CONVERGED
            return trace
        if step >= solver.max_steps:
            trace.outcome = Outcome.MAX_STEPS
            trace.message = f"no convergence within {solver.max_steps} iterations"
            return trace
        L = laplacian(cfg, tri, u)
        delta = cg_solve(-L, r, tol=1e-12)
        lam = 1.0
        while True:
            trial = u + lam * delta
            cause = None
            K_new = curvature_batch(cfg, tri, trial)
            if not np.all(np.isfinite(K_new)):
                cause = "admissibility"
            else:
                try:
                    dE = segment_energy(cfg, tri, u, trial, Kbar, max_level=8)
                except PathLeavesAdmissible:
                    cause = "admissibility"
                except QuadratureNoConvergence:
                    cause = "quadrature"
                else:
                    if dE > 0:
                        cause = "monotonicity"
            if cause is None:
                break
            trace.rejected += 1
            lam *= solver.shrink
            if lam < solver.dt_min:
                if cause in ("admissibility", "quadrature"):
                    trace.outcome = Outcome.LEFT_ADMISSIBLE
                    trace.message = f"line search failed ({cause}) near the boundary"
                else:
                    trace.outcome = Outcome.MAX_STEPS
                    trace.message = "line search found no decrease of E"
                return trace
        step += 1
        t += lam
        u = trial
        r = K_new - Kbar
        E += dE
        trace.append(step, t, lam, np.max(np.abs(r)), E, 0.5 * float(r @ r), u)
        _near_zero_warning(cfg, u, trace)


_DRIVERS = {Method.RICCI: flow_ricci, Method.CALABI: flow_calabi, Method.NEWTON: newton_solve}


def solve(cfg: SchemeConfig, tri: IdealTriangulation, u0, Kbar, solver: SolverConfig) -> FlowTrace:
    """Run the driver selected by ``solver.method``."""
    return _DRIVERS[solver.method](cfg, tri, u0, Kbar, solver)


def perturbed_start(cfg, tri, u_star, size, rng, max_tries=1000):
    """Admissible point at distance ``size`` from ``u_star`` in a random direction."""
    u_star = np.asarray(u_star, dtype=float)
    if size == 0:
        return u_star.copy()
    for _ in range(max_tries):
        d = rng.standard_normal(u_star.size)
        u0 = u_star + size * d / np.linalg.norm(d)
        if admissible(cfg, tri, u0):
            return u0
    raise NotAdmissible(f"no admissible point at distance {size:g} from u_star")


def local_basin_check(
    cfg: SchemeConfig,
    tri: IdealTriangulation,
    u_star,
    perturbation_size: float,
    method,
    seed: int = 0,
    solver: SolverConfig | None = None,
    atol: float = 1e-8,
) -> bool:
    """Whether a flow started near ``u_star`` returns to it.

    The target is ``Kbar = K(u_star)``; the start is ``u_star`` moved by
    ``perturbation_size`` in a seeded random direction.  Returns True when the
    run converges and ends within ``atol`` of ``u_star`` in every coordinate.
    """
    method = Method.parse(method)
    u_star = np.asarray(u_star, dtype=float)
    Kbar = curvature_K(cfg, tri, u_star)
    rng = np.random.default_rng(seed)
    u0 = perturbed_start(cfg, tri, u_star, perturbation_size, rng)
    solver = solver or SolverConfig(method=method, tol=1e-12, max_steps=20_000)
    if solver.method is not method:
        solver = SolverConfig(**{**solver.__dict__, "method": method})
    trace = solve(cfg, tri, u0, Kbar, solver)
    return trace.converged and bool(np.max(np.abs(trace.u_final - u_star)) <= atol)
