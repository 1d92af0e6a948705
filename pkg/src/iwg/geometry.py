"""Interface geometry on unfitted meshes: classification and chord splitting.

The interface is the zero set of a level-set function ``phi(x, y)`` that must
accept numpy arrays (scalars included) and is negative on the inner subdomain.
Each triangle is classified Regular (entirely one side) or Cut.  A cut triangle
stores the two interface points D and E on its boundary, the straight chord
D-E used by the interface finite element space, the two chord sub-polygons and
the unit chord normal pointing from the minus to the plus side.

Edge crossings are found by bisection, which is deterministic and runs a fixed
iteration count; points landing within ``SNAP_REL * h`` of a mesh vertex snap
onto it.  A sampled single-crossing check (17 points per edge) guards against
level sets that wiggle below mesh resolution.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import DegenerateCut, HypothesisViolation, NoBracket

__all__ = [
    "Regular",
    "Cut",
    "classify_elements",
    "edge_intersection",
    "split_by_chord",
    "polygon_area",
]

SNAP_REL = 1e-8      # vertex snap distance, relative to mesh size h
AREA_REL = 1e-12     # sub-polygon area floor, relative to the triangle area
PARAM_TOL = 1e-13    # bisection parametric tolerance, relative to edge length
EDGE_SAMPLES = 17    # sampled points per edge for the single-crossing guard
_BISECT_ITERS = 46   # 2**-46 < 1e-13


@dataclass(frozen=True)
class Regular:
    """Uncut element lying entirely on one side; sign is -1 or +1."""

    sign: int


_REG_MINUS = Regular(-1)
_REG_PLUS = Regular(+1)


@dataclass
class Cut:
    """Cut element with chord geometry.

    d, e are the interface points on the element boundary (d_edge / e_edge is
    the local edge carrying the point, or -1 with d_vertex / e_vertex set when
    the point coincides with a local vertex).  sub_minus / sub_plus are CCW
    polygons (3 or 4 vertices) obtained by splitting along the chord d-e, and
    normal is the unit chord normal pointing from minus to plus.
    """

    d: np.ndarray
    e: np.ndarray
    d_edge: int
    e_edge: int
    d_vertex: int
    e_vertex: int
    normal: np.ndarray
    sub_minus: np.ndarray
    sub_plus: np.ndarray
    area_minus: float
    area_plus: float
    vertex_sides: np.ndarray

    def chord_distance(self, x, y):
        """Signed distance to the chord line (positive on the plus side)."""
        return (np.asarray(x) - self.d[0]) * self.normal[0] + (
            np.asarray(y) - self.d[1]
        ) * self.normal[1]

    def breakpoint_on_edge(self, k):
        """Interface point strictly inside local edge k, or None."""
        if self.d_edge == k:
            return self.d
        if self.e_edge == k:
            return self.e
        return None


def polygon_area(poly):
    """Signed shoelace area of a polygon given as (k, 2) vertices."""
    poly = np.asarray(poly, dtype=float)
    x = poly[:, 0]
    y = poly[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def edge_intersection(phi, p, q):
    """Locate the interface crossing on segment p-q by bisection.

    Requires a strict sign change: phi(p) * phi(q) < 0, otherwise NoBracket.
    The returned point resolves the crossing parameter to PARAM_TOL relative
    to the segment length; the iteration count is fixed, so results are
    bit-reproducible.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    fp = float(phi(p[0], p[1]))
    fq = float(phi(q[0], q[1]))
    if fp == 0.0 or fq == 0.0 or (fp > 0.0) == (fq > 0.0):
        raise NoBracket(f"no strict sign change on segment {p} -> {q}: phi = {fp}, {fq}")
    ta, tb = 0.0, 1.0  # phi(ta side) keeps the sign of fp
    for _ in range(_BISECT_ITERS):
        tm = 0.5 * (ta + tb)
        r = p + tm * (q - p)
        fm = float(phi(r[0], r[1]))
        if fm == 0.0:
            ta = tb = tm
            break
        if (fm > 0.0) == (fp > 0.0):
            ta = tm
        else:
            tb = tm
    t = 0.5 * (ta + tb)
    return p + t * (q - p)


def _edge_param(pt, a, b):
    u = b - a
    return float(np.dot(pt - a, u) / np.dot(u, u))


def _walk_chord(tri, d, e, d_edge, e_edge, d_vertex, e_vertex):
    """Split the CCW triangle boundary cycle at d and e into two CCW chains."""
    tri = np.asarray(tri, dtype=float)
    cycle = []  # (tag, point); tag in {"d", "e", None}
    for k in range(3):
        if d_vertex == k:
            cycle.append(("d", tri[k]))
        elif e_vertex == k:
            cycle.append(("e", tri[k]))
        else:
            cycle.append((None, tri[k]))
        interior = []
        if d_edge == k:
            interior.append(("d", d, _edge_param(d, tri[k], tri[(k + 1) % 3])))
        if e_edge == k:
            interior.append(("e", e, _edge_param(e, tri[k], tri[(k + 1) % 3])))
        for tag, pt, _ in sorted(interior, key=lambda it: it[2]):
            cycle.append((tag, pt))

    tags = [tag for tag, _ in cycle]
    if "d" not in tags or "e" not in tags:
        raise DegenerateCut("chord endpoints not located on the triangle boundary")
    i_d = tags.index("d")
    i_e = tags.index("e")
    n = len(cycle)

    def chain(i, j):
        out = [cycle[i][1]]
        k = i
        while k != j:
            k = (k + 1) % n
            out.append(cycle[k][1])
        return np.array(out)

    poly_a = chain(i_d, i_e)
    poly_b = chain(i_e, i_d)
    if len(poly_a) < 3 or len(poly_b) < 3:
        raise DegenerateCut("chord coincides with a triangle edge")
    return poly_a, poly_b


def split_by_chord(tri, d, e, phi):
    """Split a triangle along the chord d-e and label the pieces by phi.

    d and e must lie on the triangle boundary (edges or vertices).  Returns
    (sub_minus, sub_plus, normal) with CCW sub-polygons and the unit chord
    normal oriented minus -> plus.  Raises DegenerateCut when either piece has
    area below AREA_REL relative to the triangle.
    """
    tri = np.asarray(tri, dtype=float)
    d = np.asarray(d, dtype=float)
    e = np.asarray(e, dtype=float)
    diam = max(np.linalg.norm(tri[1] - tri[0]), np.linalg.norm(tri[2] - tri[1]),
               np.linalg.norm(tri[0] - tri[2]))

    def locate(pt):
        for k in range(3):
            if np.linalg.norm(pt - tri[k]) <= 1e-12 * diam:
                return -1, k
        for k in range(3):
            a, b = tri[k], tri[(k + 1) % 3]
            t = _edge_param(pt, a, b)
            if -1e-12 < t < 1.0 + 1e-12:
                close = a + t * (b - a)
                if np.linalg.norm(pt - close) <= 1e-9 * diam:
                    return k, -1
        raise ValueError(f"point {pt} does not lie on the triangle boundary")

    d_edge, d_vertex = locate(d)
    e_edge, e_vertex = locate(e)
    poly_a, poly_b = _walk_chord(tri, d, e, d_edge, e_edge, d_vertex, e_vertex)
    return _label_and_orient(tri, d, e, poly_a, poly_b, phi)[:3]


def _label_and_orient(tri, d, e, poly_a, poly_b, phi):
    """Assign minus/plus labels by phi at sub-centroids; orient the normal."""
    area_a = polygon_area(poly_a)
    area_b = polygon_area(poly_b)
    tri_area = abs(polygon_area(tri))
    if min(area_a, area_b) <= AREA_REL * tri_area:
        raise DegenerateCut(
            f"sub-polygon area ratio {min(area_a, area_b) / tri_area:.3e} below floor"
        )
    cen_a = poly_a.mean(axis=0)
    cen_b = poly_b.mean(axis=0)
    phi_a = float(phi(cen_a[0], cen_a[1]))
    phi_b = float(phi(cen_b[0], cen_b[1]))
    if phi_a <= phi_b:
        sub_minus, area_minus = poly_a, area_a
        sub_plus, area_plus = poly_b, area_b
        cen_plus = cen_b
    else:
        sub_minus, area_minus = poly_b, area_b
        sub_plus, area_plus = poly_a, area_a
        cen_plus = cen_a
    u = e - d
    normal = np.array([u[1], -u[0]]) / np.linalg.norm(u)
    if np.dot(cen_plus - d, normal) < 0.0:
        normal = -normal
    return sub_minus, sub_plus, normal, area_minus, area_plus


def _vertex_sides(tri, d, normal, node_signs):
    sides = np.empty(3, dtype=np.int64)
    for k in range(3):
        s = float(np.dot(tri[k] - d, normal))
        if s > 0.0:
            sides[k] = 1
        elif s < 0.0:
            sides[k] = -1
        else:
            sides[k] = 1 if node_signs[k] > 0 else -1
    return sides


def _single_crossing_guard(mesh, phi, crossed_ids):
    """Raise HypothesisViolation when a crossed edge has multiple roots.

    Only edges whose endpoint signs differ are checked: those are the edges
    the classifier bisects, and three or more crossings there leave no
    well-defined chord point.  An even number of crossings interior to a
    same-sign edge (the interface dipping through and back, as a curved lobe
    does between mesh points) is below the resolution the piecewise-linear
    geometry uses and is deliberately ignored; refining the mesh resolves it.
    """
    if len(crossed_ids) == 0:
        return
    t = np.linspace(0.0, 1.0, EDGE_SAMPLES)
    a = mesh.nodes[mesh.edges[crossed_ids, 0]]
    b = mesh.nodes[mesh.edges[crossed_ids, 1]]
    pts = a[:, None, :] + t[None, :, None] * (b - a)[:, None, :]
    vals = np.asarray(phi(pts[..., 0].ravel(), pts[..., 1].ravel()))
    signs = np.sign(vals).reshape(len(crossed_ids), EDGE_SAMPLES)
    for row, eid in enumerate(crossed_ids):
        s = signs[row]
        s = s[s != 0]
        changes = int(np.sum(s[1:] * s[:-1] < 0))
        if changes > 1:
            raise HypothesisViolation(
                f"edge {eid} shows {changes} sign changes over {EDGE_SAMPLES} samples; "
                "the interface crosses it more than once"
            )


def classify_elements(mesh, phi):
    """Classify every triangle of the mesh as Regular or Cut.

    Detects crossed edges from vertex signs, runs the sampled multi-root
    guard on them, bisects each crossed edge once (shared by neighbors),
    snaps near-vertex crossings, and splits cut triangles along their chord.
    A split whose smaller piece falls below the area floor reclassifies the
    element as Regular on its dominant side.
    """
    node_phi = np.asarray(phi(mesh.nodes[:, 0], mesh.nodes[:, 1]), dtype=float)
    node_sign = np.sign(node_phi).astype(np.int64)

    s_lo = node_sign[mesh.edges[:, 0]]
    s_hi = node_sign[mesh.edges[:, 1]]
    crossed = s_lo * s_hi < 0

    _single_crossing_guard(mesh, phi, np.nonzero(crossed)[0])

    # bisect all crossed edges at once; fixed iteration count, vectorized phi
    cross_pt = {}
    cross_vertex = {}  # global node id after snapping, else -1
    ids = np.nonzero(crossed)[0]
    if len(ids):
        p = mesh.nodes[mesh.edges[ids, 0]]
        q = mesh.nodes[mesh.edges[ids, 1]]
        fp = node_phi[mesh.edges[ids, 0]]
        ta = np.zeros(len(ids))
        tb = np.ones(len(ids))
        for _ in range(_BISECT_ITERS):
            tm = 0.5 * (ta + tb)
            r = p + tm[:, None] * (q - p)
            fm = np.asarray(phi(r[:, 0], r[:, 1]), dtype=float)
            same = (fm > 0.0) == (fp > 0.0)
            exact = fm == 0.0
            ta = np.where(same & ~exact, tm, ta)
            tb = np.where(~same & ~exact, tm, tb)
            ta = np.where(exact, tm, ta)
            tb = np.where(exact, tm, tb)
        t = 0.5 * (ta + tb)
        pts = p + t[:, None] * (q - p)
        lengths = np.linalg.norm(q - p, axis=1)
        snap = SNAP_REL * mesh.h
        for row, eid in enumerate(ids):
            if t[row] * lengths[row] <= snap:
                v = mesh.edges[eid, 0]
                cross_pt[eid] = mesh.nodes[v].copy()
                cross_vertex[eid] = int(v)
            elif (1.0 - t[row]) * lengths[row] <= snap:
                v = mesh.edges[eid, 1]
                cross_pt[eid] = mesh.nodes[v].copy()
                cross_vertex[eid] = int(v)
            else:
                cross_pt[eid] = pts[row]
                cross_vertex[eid] = -1

    tri_signs = node_sign[mesh.triangles]
    tri_crossed = crossed[mesh.tri_edges]
    n_crossed = tri_crossed.sum(axis=1)
    n_zero = (tri_signs == 0).sum(axis=1)
    plain = (n_crossed == 0) & (n_zero == 0)

    classes = [None] * mesh.n_triangles
    for t_id in np.nonzero(plain)[0]:
        classes[t_id] = _REG_PLUS if tri_signs[t_id, 0] > 0 else _REG_MINUS

    def regular_fallback(t_id):
        cen = mesh.points_of(t_id).mean(axis=0)
        val = float(phi(cen[0], cen[1]))
        if val > 0.0:
            return _REG_PLUS
        if val < 0.0:
            return _REG_MINUS
        nz = tri_signs[t_id][tri_signs[t_id] != 0]
        return _REG_PLUS if nz.sum() > 0 else _REG_MINUS

    for t_id in np.nonzero(~plain)[0]:
        tri = mesh.points_of(t_id)
        verts = mesh.triangles[t_id]
        xed = np.nonzero(tri_crossed[t_id])[0]

        if len(xed) == 0:
            classes[t_id] = regular_fallback(t_id)
            continue
        if len(xed) == 1:
            # parity: a single strict crossing must exit through a vertex
            k = int(xed[0])
            off = (k + 2) % 3
            if tri_signs[t_id, off] != 0:
                raise HypothesisViolation(
                    f"element {t_id}: one crossed edge and no zero vertex"
                )
            eid = mesh.tri_edges[t_id, k]
            d, dv_global = cross_pt[eid], cross_vertex[eid]
            e, ev_global = mesh.nodes[verts[off]].copy(), int(verts[off])
        elif len(xed) == 2:
            k1, k2 = int(xed[0]), int(xed[1])
            e1, e2 = mesh.tri_edges[t_id, k1], mesh.tri_edges[t_id, k2]
            d, dv_global = cross_pt[e1], cross_vertex[e1]
            e, ev_global = cross_pt[e2], cross_vertex[e2]
            k = k1
            off = k2
        else:
            raise HypothesisViolation(f"element {t_id}: 3 crossed edges")

        if dv_global >= 0 and dv_global == ev_global:
            classes[t_id] = regular_fallback(t_id)
            continue

        local_of = {int(v): i for i, v in enumerate(verts)}
        d_vertex = local_of.get(dv_global, -1) if dv_global >= 0 else -1
        e_vertex = local_of.get(ev_global, -1) if ev_global >= 0 else -1
        d_edge = -1 if d_vertex >= 0 else k
        e_edge = -1 if e_vertex >= 0 else off

        try:
            poly_a, poly_b = _walk_chord(tri, d, e, d_edge, e_edge, d_vertex, e_vertex)
            sub_minus, sub_plus, normal, area_m, area_p = _label_and_orient(
                tri, d, e, poly_a, poly_b, phi
            )
        except DegenerateCut:
            classes[t_id] = regular_fallback(t_id)
            continue

        classes[t_id] = Cut(
            d=d,
            e=e,
            d_edge=d_edge,
            e_edge=e_edge,
            d_vertex=d_vertex,
            e_vertex=e_vertex,
            normal=normal,
            sub_minus=sub_minus,
            sub_plus=sub_plus,
            area_minus=area_m,
            area_plus=area_p,
            vertex_sides=_vertex_sides(tri, d, normal, tri_signs[t_id]),
        )

    return classes
