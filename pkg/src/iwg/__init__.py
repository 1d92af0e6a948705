"""Immersed weak Galerkin solver for 2D elliptic interface problems.

Weak Galerkin discretization with P1 interior / P0 edge unknowns on uniform
unfitted triangular meshes; elements crossed by the interface use an immersed
P1 space satisfying the jump conditions along a straight chord.
"""

from .assembly import (
    AssembledSystem,
    DofMap,
    WgSolution,
    assemble,
    build_cut_bases,
    build_dof_map,
    edge_average_gauss,
    local_matrix,
    qb_project_on_edge,
    split_solution,
)
from .error_analysis import ErrorReport, OrderRow, compute_errors, convergence_orders, energy_norm
from .exceptions import (
    DegenerateCut,
    HypothesisViolation,
    IwgError,
    MismatchedLadder,
    MissingExactSolution,
    NoBracket,
    NotConverged,
    NotSPD,
    SingularSystem,
)
from .geometry import Cut, Regular, classify_elements, edge_intersection, split_by_chord
from .ife import IfeBasis, P1Basis, build_ife_basis, build_p1_basis, eval_basis, p1_coefficients
from .mesh import UniformMesh, build_uniform_mesh, element_diameter
from .problems import PROBLEMS, InterfaceProblem, problem_circle, problem_corner, problem_petal
from .quadrature import QuadRule, integrate_polygon, triangle_rule
from .solver import SolverConfig, solve, solve_condensed, solve_problem
from .study import StudyConfig, StudyResult, format_table, run_study
from .vtk_export import export_field

__version__ = "0.1.0"
