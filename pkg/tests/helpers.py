"""Shared helpers for the test suite.

Keeps the patch problems, the randomized cut generator and the independent
dense local-matrix oracle in one place so the unit tests and the acceptance
gate exercise the same constructions.
"""

import time
from functools import lru_cache

import numpy as np

from iwg.assembly import build_basis, build_cut_bases
from iwg.geometry import Cut, Regular, classify_elements, polygon_area, split_by_chord
from iwg.mesh import build_uniform_mesh
from iwg.problems import InterfaceProblem
from iwg.quadrature import gauss_legendre_01, integrate_polygon
from iwg.solver import solve_problem
from iwg.study import StudyConfig, run_study


def _zeros(x, y):
    return np.zeros_like(np.asarray(x, dtype=float))


def _ones(x, y):
    return np.ones_like(np.asarray(x, dtype=float))


def linear_patch_problem():
    """u = x + y, beta = (1, 1), no interface anywhere in the domain."""
    u = lambda x, y: np.asarray(x, dtype=float) + np.asarray(y, dtype=float)
    return InterfaceProblem(
        name="linear_patch", domain=(-1.0, 1.0, -1.0, 1.0),
        beta_minus=1.0, beta_plus=1.0,
        phi=lambda x, y: -_ones(x, y),
        f_minus=_zeros, f_plus=_zeros,
        u_minus=u, u_plus=u,
        grad_u_minus=lambda x, y: (_ones(x, y), _zeros(x, y) + 1.0),
        grad_u_plus=lambda x, y: (_ones(x, y), _zeros(x, y) + 1.0),
    )


def interface_patch_problem():
    """Vertical interface x = 0.2, beta = (1, 10), piecewise linear exact u.

    u- = x, u+ = x/10 + 0.18; continuous at x = 0.2 and flux-continuous
    (beta u' = 1 on both sides), with f = 0.  The chord of every cut element
    lies exactly on the interface, so the discrete space contains u.
    """
    return InterfaceProblem(
        name="interface_patch", domain=(-1.0, 1.0, -1.0, 1.0),
        beta_minus=1.0, beta_plus=10.0,
        phi=lambda x, y: np.asarray(x, dtype=float) - 0.2,
        f_minus=_zeros, f_plus=_zeros,
        u_minus=lambda x, y: np.asarray(x, dtype=float) + 0.0 * np.asarray(y),
        u_plus=lambda x, y: 0.1 * np.asarray(x, dtype=float) + 0.18 + 0.0 * np.asarray(y),
        grad_u_minus=lambda x, y: (_ones(x, y), _zeros(x, y)),
        grad_u_plus=lambda x, y: (0.1 * _ones(x, y), _zeros(x, y)),
    )


def random_cut(rng, min_area=0.1, param_range=(0.15, 0.85), tri=None):
    """Random CCW triangle with a random chord through two distinct edges.

    Returns (tri, cut) where cut carries the same fields classification would
    produce for the linear level set through the chord.  Pass tri to keep the
    triangle fixed and randomize only the chord.
    """
    if tri is None:
        while True:
            tri = rng.uniform(-1.0, 1.0, size=(3, 2))
            area = polygon_area(tri)
            if area < 0.0:
                tri = tri[::-1].copy()
                area = -area
            if area > min_area:
                break
    k1, k2 = rng.permutation(3)[:2]
    t1, t2 = rng.uniform(*param_range, size=2)
    d = tri[k1] + t1 * (tri[(k1 + 1) % 3] - tri[k1])
    e = tri[k2] + t2 * (tri[(k2 + 1) % 3] - tri[k2])
    u = e - d
    normal = np.array([u[1], -u[0]]) / np.linalg.norm(u)

    def phi(x, y):
        return (np.asarray(x) - d[0]) * normal[0] + (np.asarray(y) - d[1]) * normal[1]

    sub_minus, sub_plus, normal = split_by_chord(tri, d, e, phi)
    sides = np.empty(3, dtype=np.int64)
    for k in range(3):
        s = float(np.dot(tri[k] - d, normal))
        sides[k] = 1 if s > 0.0 else -1
    cut = Cut(
        d=d, e=e, d_edge=int(k1), e_edge=int(k2), d_vertex=-1, e_vertex=-1,
        normal=normal, sub_minus=sub_minus, sub_plus=sub_plus,
        area_minus=polygon_area(sub_minus), area_plus=polygon_area(sub_plus),
        vertex_sides=sides,
    )
    return tri, cut


def exact_edge_average_piecewise(problem, p, q, bp):
    """Average of the exact trace over edge p->q with one kink at bp.

    Each piece takes the side of the level set at its own midpoint; trapezoid
    per piece, exact for piecewise-linear traces.
    """
    total = 0.0
    length = 0.0
    for a, b in ((p, bp), (bp, q)):
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        mid = 0.5 * (a + b)
        ell = float(np.linalg.norm(b - a))
        side = float(problem.phi(mid[0], mid[1]))
        u = problem.u_plus if side > 0 else problem.u_minus
        val = 0.5 * (float(u(a[0], a[1])) + float(u(b[0], b[1])))
        total += ell * val
        length += ell
    return total / length


def ife_residuals(tri, cut, basis):
    """Max residuals of the defining equations, grouped.

    Returns (nodal, continuity, flux_normalized, partition): the delta
    property at the vertices, continuity at both chord endpoints, the flux
    jump divided by max(beta), and the partition-of-unity defect.
    """
    cm = basis.coeffs_minus
    cp = basis.coeffs_plus
    bmax = max(basis.beta_minus, basis.beta_plus)

    nodal = 0.0
    for j in range(3):
        c = cp if cut.vertex_sides[j] > 0 else cm
        vals = c[:, 0] + c[:, 1] * tri[j, 0] + c[:, 2] * tri[j, 1]
        target = np.zeros(3)
        target[j] = 1.0
        nodal = max(nodal, float(np.max(np.abs(vals - target))))

    cont = 0.0
    for pt in (cut.d, cut.e):
        vm = cm[:, 0] + cm[:, 1] * pt[0] + cm[:, 2] * pt[1]
        vp = cp[:, 0] + cp[:, 1] * pt[0] + cp[:, 2] * pt[1]
        cont = max(cont, float(np.max(np.abs(vm - vp))))

    n = cut.normal
    fm = basis.beta_minus * (cm[:, 1] * n[0] + cm[:, 2] * n[1])
    fp = basis.beta_plus * (cp[:, 1] * n[0] + cp[:, 2] * n[1])
    flux = float(np.max(np.abs(fm - fp))) / bmax

    part = max(
        float(np.max(np.abs(cm.sum(axis=0) - [1.0, 0.0, 0.0]))),
        float(np.max(np.abs(cp.sum(axis=0) - [1.0, 0.0, 0.0]))),
    )
    return nodal, cont, flux, part


def dense_local_oracle(tri, cls, beta_minus, beta_plus, rho, h_t, basis=None,
                       n_gauss=20, vol_degree=4):
    """Independent 6x6 local matrix by dense quadrature.

    Volume term by a triangle rule over the (fanned) sub-polygons, edge
    averages and fluxes by n_gauss-point Gauss-Legendre per smooth edge piece,
    never the midpoint shortcut.  Same stabilizer weight convention as the
    production path: beta per regular element, max(beta) on cut ones.
    """
    tri = np.asarray(tri, dtype=float)
    if basis is None:
        basis = build_basis(tri, cls, beta_minus, beta_plus)
    regular = isinstance(cls, Regular)
    tq, wq = gauss_legendre_01(n_gauss)

    M = np.zeros((6, 6))
    if regular:
        pieces = ((cls.sign, tri),)
        w_stab = beta_plus if cls.sign > 0 else beta_minus
    else:
        pieces = ((-1, cls.sub_minus), (1, cls.sub_plus))
        w_stab = max(beta_minus, beta_plus)
    for side, poly in pieces:
        beta = beta_plus if side > 0 else beta_minus
        c = basis.side_coeffs(side) if not regular else basis.coeffs
        G = c[:, 1:3]
        for i in range(3):
            for j in range(3):
                gij = float(G[i] @ G[j])
                M[i, j] += beta * integrate_polygon(
                    poly, lambda x, y, v=gij: v * np.ones_like(np.asarray(x)),
                    vol_degree,
                )

    for k in range(3):
        p = tri[k]
        q = tri[(k + 1) % 3]
        L = float(np.linalg.norm(q - p))
        ne = np.array([q[1] - p[1], -(q[0] - p[0])]) / L
        if regular:
            segs = [(p, q)]
        else:
            bp = cls.breakpoint_on_edge(k)
            segs = [(p, q)] if bp is None else [(p, np.asarray(bp, dtype=float)),
                                               (np.asarray(bp, dtype=float), q)]
        qb = np.zeros(3)
        flux = np.zeros(3)
        for a, b in segs:
            pts = a[None, :] + tq[:, None] * (b - a)[None, :]
            frac = float(np.linalg.norm(b - a)) / L
            for pt, wt in zip(pts, wq):
                if regular:
                    side = cls.sign
                else:
                    s = float(basis.chord_distance(pt[0], pt[1]))
                    side = 1 if s > 0.0 else -1
                c = basis.side_coeffs(side) if not regular else basis.coeffs
                beta = beta_plus if side > 0 else beta_minus
                qb += wt * frac * (c[:, 0] + c[:, 1] * pt[0] + c[:, 2] * pt[1])
                flux += wt * frac * beta * (c[:, 1:3] @ ne)
        g = np.zeros(6)
        g[:3] = qb
        g[3 + k] = -1.0
        f = np.zeros(6)
        f[:3] = flux
        M -= L * (np.outer(f, g) + np.outer(g, f))
        M += (rho * w_stab / h_t) * L * np.outer(g, g)
    return M


@lru_cache(maxsize=None)
def _solved_cache(key):
    factory, args, n = key
    problem = factory(*args)
    mesh = build_uniform_mesh(problem.domain, n)
    classes = classify_elements(mesh, problem.phi)
    bases = build_cut_bases(mesh, classes, problem)
    solution, system = solve_problem(mesh, classes, problem)
    return problem, mesh, classes, bases, solution, system


def solved_state(factory, args, n):
    """Cached (problem, mesh, classes, bases, solution, system) for a level."""
    return _solved_cache((factory, tuple(args), int(n)))


def timed_ladder(problem, levels, rho=10.0, solver=None, keep_last=False):
    """run_study wrapped with a wall-clock measurement."""
    kwargs = {} if solver is None else {"solver": solver}
    config = StudyConfig(problem=problem, levels=tuple(levels), rho=rho, **kwargs)
    t0 = time.perf_counter()
    result = run_study(config, keep_last=keep_last)
    return result, time.perf_counter() - t0
