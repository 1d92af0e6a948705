"""Linear solvers for the reduced WG system and the solve orchestration.

The reduced system from the default (beta-weighted) assembly is symmetric
positive definite, so the direct path factors it in SuperLU symmetric mode
with diagonal pivoting; a nonpositive pivot means the matrix is not SPD and
raises NotSPD, which signals an assembly bug or an upstream hypothesis
violation (for instance the plain stabilizer with rho below 2 max(beta)).
spd_check exposes the same inertia test as a boolean diagnostic.  Iterative
path: conjugate gradients with optional Jacobi preconditioning.  "auto"
picks direct up to 4e5 unknowns.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import cg, splu

from .assembly import assemble, split_solution
from .exceptions import NotConverged, NotSPD

__all__ = ["SolverConfig", "solve", "spd_check", "solve_problem", "solve_condensed",
           "DIRECT_DOF_LIMIT"]

DIRECT_DOF_LIMIT = 400_000


@dataclass
class SolverConfig:
    method: str = "auto"  # auto | direct | cg
    tol: float = 1e-12
    maxiter: Optional[int] = None  # cg default: 20 * sqrt(dim)
    jacobi: bool = True

    def __post_init__(self):
        if self.method not in ("auto", "direct", "cg"):
            raise ValueError(f"unknown solver method {self.method!r}")
        if not (0.0 < self.tol < 1.0):
            raise ValueError(f"tolerance must be in (0, 1), got {self.tol}")

    def resolved_method(self, dim):
        if self.method != "auto":
            return self.method
        return "direct" if dim <= DIRECT_DOF_LIMIT else "cg"


def _spd_factor(A):
    """SuperLU factorization in symmetric mode with diagonal pivoting.

    The U diagonal then carries the LDL^T pivots, whose signs give the
    inertia: all positive means positive definite.
    """
    return splu(
        sp.csc_matrix(A),
        permc_spec="MMD_AT_PLUS_A",
        diag_pivot_thresh=0.0,
        options=dict(SymmetricMode=True),
    )


def spd_check(A):
    """True when the symmetric matrix is positive definite."""
    try:
        lu = _spd_factor(A)
    except RuntimeError:
        return False
    piv = lu.U.diagonal()
    return bool(np.all(np.isfinite(piv)) and np.all(piv > 0.0))


def _solve_direct(A, b):
    try:
        lu = _spd_factor(A)
    except RuntimeError as exc:
        raise NotSPD(f"symmetric factorization failed: {exc}") from exc
    piv = lu.U.diagonal()
    if not np.all(np.isfinite(piv) & (piv > 0.0)):
        finite = piv[np.isfinite(piv)]
        detail = f"min pivot {finite.min():.3e}" if finite.size else "non-finite pivots"
        raise NotSPD(f"matrix is not positive definite ({detail})")
    x = lu.solve(b)
    if not np.all(np.isfinite(x)):
        raise NotSPD("direct solve produced non-finite entries")
    return x


def _solve_cg(A, b, config):
    dim = A.shape[0]
    maxiter = config.maxiter or int(20 * math.sqrt(dim))
    M = None
    if config.jacobi:
        d = A.diagonal()
        if np.any(d <= 0.0):
            raise NotSPD("nonpositive diagonal entry; Jacobi preconditioner undefined")
        M = sp.diags(1.0 / d)
    x, info = cg(A, b, rtol=config.tol, atol=0.0, maxiter=maxiter, M=M)
    if info > 0:
        raise NotConverged(f"cg did not reach tol {config.tol:g} in {maxiter} iterations")
    if info < 0:
        raise ValueError(f"cg reported illegal input (info={info})")
    return x


def solve(A, b, config=None):
    """Solve the reduced system with the configured method."""
    config = config or SolverConfig()
    method = config.resolved_method(A.shape[0])
    if method == "direct":
        return _solve_direct(A, b)
    return _solve_cg(A, b, config)


def solve_condensed(system, config=None):
    """Solve via static condensation onto the edge unknowns.

    Eliminates the element-local interior blocks (exact Schur complement),
    solves the edge system directly, then back-substitutes.  Returns the full
    coefficient vector; agrees with the unreduced solve to roundoff.
    """
    dmap = system.dof_map
    T = dmap.n_elements
    E = dmap.n_edges
    M = system.local_matrices
    AII = M[:, :3, :3]
    AIB = M[:, :3, 3:]
    ABI = M[:, 3:, :3]
    ABB = M[:, 3:, 3:]
    AIIinv = np.linalg.inv(AII)
    rI = system.rhs[: 3 * T].reshape(T, 3)

    S_loc = ABB - ABI @ (AIIinv @ AIB)
    b_loc = -(ABI @ (AIIinv @ rI[..., None]))[..., 0]

    eids = system.element_dofs[:, 3:] - 3 * T
    rows = np.repeat(eids, 3, axis=1).ravel()
    cols = np.tile(eids, (1, 3)).ravel()
    A_e = sp.coo_matrix((S_loc.reshape(T, 9).ravel(), (rows, cols)), shape=(E, E)).tocsr()
    b_e = np.zeros(E)
    np.add.at(b_e, eids.ravel(), b_loc.ravel())

    fixed = np.zeros(E, dtype=bool)
    bids = dmap.boundary_edges
    fixed[bids] = True
    free = np.nonzero(~fixed)[0]
    rhs = b_e[free] - A_e[free][:, bids] @ system.boundary_values
    edge = np.empty(E)
    edge[bids] = system.boundary_values
    edge[free] = _solve_direct(A_e[free][:, free], rhs)

    UB = edge[eids]
    UI = (AIIinv @ (rI - (AIB @ UB[..., None])[..., 0])[..., None])[..., 0]
    return np.concatenate([UI.ravel(), edge])


def solve_problem(mesh, classes, problem, rho=None, config=None, condense=False,
                  system=None, weighted=True):
    """Assemble (unless given) and solve; returns (WgSolution, AssembledSystem)."""
    if system is None:
        kwargs = {"weighted": weighted}
        if rho is not None:
            kwargs["rho"] = rho
        system = assemble(mesh, classes, problem, **kwargs)
    if condense:
        x = solve_condensed(system, config)
    else:
        xf = solve(system.reduced_matrix, system.reduced_rhs, config)
        x = np.empty(system.dof_map.total)
        x[system.free_dofs] = xf
        x[system.boundary_dofs] = system.boundary_values
    return split_solution(system.dof_map, x), system
