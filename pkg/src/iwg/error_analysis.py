"""Error norms against exact solutions and convergence-order tables.

L2 and H1-semi errors integrate with a degree-4 triangle rule; on cut elements
the rule runs per chord sub-polygon over a midpoint-refined fan so the
curve/chord mismatch strip is resolved.  The sup norms sample the mesh nodes
(interior part, per incident element) and the edge midpoints (edge part,
exact trace value against the edge constant).  On edges the interface crosses
the trace is kinked while the approximation is a single constant, so eb_inf
decays first order there by construction; that term dominates the reported
eb_inf once the interior error falls below it.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .assembly import WgSolution, build_cut_bases, edge_average_gauss, edge_breakpoints
from .exceptions import MismatchedLadder, MissingExactSolution
from .geometry import Cut, Regular
from .ife import p1_coefficients
from .quadrature import fan_triangles, gauss_legendre_01, map_to_triangle, refine_triangle, triangle_rule

__all__ = ["ErrorReport", "OrderRow", "compute_errors", "convergence_orders",
           "energy_norm", "exact_edge_averages"]


@dataclass
class ErrorReport:
    n_per_side: int
    h: float
    dofs: int
    e0_inf: float
    eb_inf: float
    e0_l2: float
    e0_h1: float
    energy: Optional[float] = None


@dataclass
class OrderRow:
    e0_inf: float
    eb_inf: float
    e0_l2: float
    e0_h1: float


def _refined(tri, levels):
    tris = [tri]
    for _ in range(levels):
        tris = [child for t in tris for child in refine_triangle(t)]
    return tris


def compute_errors(solution, problem, mesh, classes, bases=None, degree=4,
                   cut_refine=1, include_energy=False, rho=10.0):
    """All error norms of a WG solution against the registered exact solution."""
    if not problem.has_exact:
        raise MissingExactSolution(f"problem {problem.name!r} has no exact solution")
    if bases is None:
        bases = build_cut_bases(mesh, classes, problem)

    T = mesh.n_triangles
    interior = solution.interior
    rule = triangle_rule(degree)
    bar = rule.points
    wq = rule.weights

    reg_mask = np.array([isinstance(c, Regular) for c in classes])
    l2 = 0.0
    h1 = 0.0

    # regular elements: vectorized per congruence class (gradients are shared)
    for parity in (0, 1):
        ids = np.nonzero(reg_mask & (np.arange(T) % 2 == parity))[0]
        if len(ids) == 0:
            continue
        coords = mesh.tri_coords[ids]
        v1 = coords[:, 1] - coords[:, 0]
        v2 = coords[:, 2] - coords[:, 0]
        area = 0.5 * np.abs(v1[:, 0] * v2[:, 1] - v1[:, 1] * v2[:, 0])
        pts = np.einsum("qk,tkd->tqd", bar, coords)
        x = pts[..., 0].ravel()
        y = pts[..., 1].ravel()
        uex = np.asarray(problem.u(x, y), dtype=float).reshape(len(ids), -1)
        gx, gy = problem.grad_u(x, y)
        gx = np.asarray(gx, dtype=float).reshape(len(ids), -1)
        gy = np.asarray(gy, dtype=float).reshape(len(ids), -1)
        u0 = np.einsum("qk,tk->tq", bar, interior[ids])
        G = p1_coefficients(mesh.points_of(parity))[:, 1:3]
        g0 = interior[ids] @ G
        l2 += float(np.sum(area * ((u0 - uex) ** 2 @ wq)))
        h1 += float(np.sum(area * (((g0[:, 0:1] - gx) ** 2 + (g0[:, 1:2] - gy) ** 2) @ wq)))

    for t in np.nonzero(~reg_mask)[0]:
        cls = classes[t]
        basis = bases[t]
        for side, poly in ((-1, cls.sub_minus), (1, cls.sub_plus)):
            c = basis.side_coeffs(side)
            g0 = interior[t] @ c[:, 1:3]
            for ftri in fan_triangles(poly):
                for small in _refined(ftri, cut_refine):
                    pts, w = map_to_triangle(rule, small)
                    x, y = pts[:, 0], pts[:, 1]
                    uex = np.asarray(problem.u(x, y), dtype=float)
                    gx, gy = problem.grad_u(x, y)
                    vals = c[:, 0, None] + c[:, 1, None] * x + c[:, 2, None] * y
                    u0 = interior[t] @ vals
                    l2 += float(w @ (u0 - uex) ** 2)
                    h1 += float(w @ ((g0[0] - np.asarray(gx)) ** 2
                                     + (g0[1] - np.asarray(gy)) ** 2))

    # interior sup error at the nodes (the bases are nodal)
    uex_nodes = np.asarray(
        problem.u(mesh.nodes[:, 0], mesh.nodes[:, 1]), dtype=float
    )
    e0_inf = float(np.max(np.abs(uex_nodes[mesh.triangles] - interior)))

    # edge sup error: exact trace at edge midpoints against the edge constants
    mid = 0.5 * (mesh.nodes[mesh.edges[:, 0]] + mesh.nodes[mesh.edges[:, 1]])
    u_mid = np.asarray(problem.u(mid[:, 0], mid[:, 1]), dtype=float)
    eb_inf = float(np.max(np.abs(u_mid - solution.edge)))

    energy = None
    if include_energy:
        interp = WgSolution(
            interior=uex_nodes[mesh.triangles].astype(float),
            edge=exact_edge_averages(mesh, classes, problem),
        )
        diff = WgSolution(
            interior=solution.interior - interp.interior,
            edge=solution.edge - interp.edge,
        )
        energy = energy_norm(diff, mesh, classes, bases, problem, rho=rho)

    return ErrorReport(
        n_per_side=mesh.n_per_side,
        h=mesh.h,
        dofs=3 * T + mesh.n_edges,
        e0_inf=e0_inf,
        eb_inf=eb_inf,
        e0_l2=math.sqrt(l2),
        e0_h1=math.sqrt(h1),
        energy=energy,
    )


def exact_edge_averages(mesh, classes, problem):
    """Edge averages of the exact solution (3-point Gauss, composite across
    interface breakpoints); the edge component of the exact interpolant."""
    p = mesh.nodes[mesh.edges[:, 0]]
    q = mesh.nodes[mesh.edges[:, 1]]
    t, w = gauss_legendre_01(3)
    pts = p[:, None, :] + t[None, :, None] * (q - p)[:, None, :]
    vals = np.asarray(
        problem.u(pts[..., 0].ravel(), pts[..., 1].ravel()), dtype=float
    ).reshape(mesh.n_edges, len(t))
    qb_u = vals @ w
    for eid, bp in edge_breakpoints(mesh, classes).items():
        qb_u[eid] = edge_average_gauss(problem.u, p[eid], q[eid], bp)
    return qb_u


def energy_norm(v, mesh, classes, bases, problem, rho=10.0, weighted=True):
    """Discrete energy norm of a weak function: beta-weighted gradient energy
    plus the edge stabilizer, with the same stabilizer weight convention as
    the bilinear form (beta per uncut element, max beta on cut ones when
    weighted, plain otherwise)."""
    total = 0.0
    h = mesh.h
    for t in range(mesh.n_triangles):
        cls = classes[t]
        tri = mesh.points_of(t)
        if isinstance(cls, Regular):
            c = p1_coefficients(tri)
            v1 = tri[1] - tri[0]
            v2 = tri[2] - tri[0]
            area = abs(0.5 * (v1[0] * v2[1] - v1[1] * v2[0]))
            sides = ((cls.sign, area, c),)
            w_stab = problem.beta(cls.sign) if weighted else 1.0
        else:
            basis = bases[t]
            sides = (
                (-1, cls.area_minus, basis.coeffs_minus),
                (1, cls.area_plus, basis.coeffs_plus),
            )
            w_stab = max(problem.beta_minus, problem.beta_plus) if weighted else 1.0
        for side, area, c in sides:
            g = v.interior[t] @ c[:, 1:3]
            total += problem.beta(side) * area * float(g @ g)
        for k in range(3):
            pk = tri[k]
            qk = tri[(k + 1) % 3]
            L = float(np.linalg.norm(qk - pk))
            if isinstance(cls, Regular):
                pieces = [(pk, qk)]
            else:
                bp = cls.breakpoint_on_edge(k)
                pieces = [(pk, qk)] if bp is None else [(pk, bp), (bp, qk)]
            qb = 0.0
            for a, b in pieces:
                a = np.asarray(a, dtype=float)
                b = np.asarray(b, dtype=float)
                mid = 0.5 * (a + b)
                wfrac = float(np.linalg.norm(b - a)) / L
                if isinstance(cls, Regular):
                    c = p1_coefficients(tri)
                else:
                    s = float(bases[t].chord_distance(mid[0], mid[1]))
                    c = bases[t].side_coeffs(1 if s > 0.0 else -1)
                qb += wfrac * float(v.interior[t] @ (c[:, 0] + c[:, 1] * mid[0] + c[:, 2] * mid[1]))
            jump = qb - v.edge[mesh.tri_edges[t, k]]
            total += (rho * w_stab / h) * L * jump * jump
    return math.sqrt(total)


def convergence_orders(reports):
    """Per-norm orders between consecutive ladder levels.

    Levels must halve h: n_fine == 2 * n_coarse or 2 * n_coarse - 1 (the odd
    ladder), otherwise MismatchedLadder.
    """
    out = []
    for a, b in zip(reports[:-1], reports[1:]):
        if b.n_per_side not in (2 * a.n_per_side, 2 * a.n_per_side - 1):
            raise MismatchedLadder(
                f"levels {a.n_per_side} -> {b.n_per_side} do not halve the mesh size"
            )
        ratio = math.log(a.h / b.h)

        def order(ec, ef):
            if ec <= 0.0 or ef <= 0.0:
                return float("nan")
            return math.log(ec / ef) / ratio

        out.append(OrderRow(
            e0_inf=order(a.e0_inf, b.e0_inf),
            eb_inf=order(a.eb_inf, b.eb_inf),
            e0_l2=order(a.e0_l2, b.e0_l2),
            e0_h1=order(a.e0_h1, b.e0_h1),
        ))
    return out
