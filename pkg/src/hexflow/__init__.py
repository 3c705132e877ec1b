"""Discrete conformal structures on ideally triangulated surfaces with boundary.

Boundary components carry conformal factors; edge lengths follow from one of
six length laws, and the curvature of a boundary component is its total length
computed from right-angled hyperbolic hexagons.  Ricci flow, Calabi flow and
Newton's method solve for factors with prescribed curvature.
"""

from hexflow.curvature import curvature_K, energy_C, energy_E, laplacian
from hexflow.flows import Method, Outcome, SolverConfig, flow_calabi, flow_ricci, newton_solve, solve
from hexflow.schemes import SchemeKind, admissible, make_scheme, sample_admissible
from hexflow.topology import IdealTriangulation, build_triangulation

__all__ = [
    "IdealTriangulation",
    "Method",
    "Outcome",
    "SchemeKind",
    "SolverConfig",
    "admissible",
    "build_triangulation",
    "curvature_K",
    "energy_C",
    "energy_E",
    "flow_calabi",
    "flow_ricci",
    "laplacian",
    "make_scheme",
    "newton_solve",
    "sample_admissible",
    "solve",
]
