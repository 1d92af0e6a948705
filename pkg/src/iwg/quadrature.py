"""Quadrature rules on triangles, convex polygons and edge segments.

Triangle rules are symmetric Gauss rules given in barycentric coordinates with
weights summing to one; integrals are weight * area * f(point) sums.  Convex
polygons are integrated by fanning triangles from the first vertex.
"""

import numpy as np

__all__ = [
    "QuadRule",
    "triangle_rule",
    "map_to_triangle",
    "triangle_area",
    "integrate_polygon",
    "fan_triangles",
    "refine_triangle",
    "gauss_legendre_01",
]


class QuadRule:
    """Symmetric quadrature rule on the reference triangle.

    Attributes
    ----------
    degree : int
        Highest polynomial degree integrated exactly.
    points : ndarray, shape (n, 3)
        Barycentric coordinates of the nodes.
    weights : ndarray, shape (n,)
        Normalized weights (sum to 1).
    """

    def __init__(self, degree, points, weights):
        self.degree = degree
        self.points = np.asarray(points, dtype=float)
        self.weights = np.asarray(weights, dtype=float)
        self.weights = self.weights / self.weights.sum()


def _orbit3(a, b):
    # cyclic permutations of (a, b, b)
    return [(a, b, b), (b, a, b), (b, b, a)]


def _orbit6(a, b, c):
    return [(a, b, c), (a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)]


def _build_rules():
    rules = {}

    pts = _orbit3(2.0 / 3.0, 1.0 / 6.0)
    rules[2] = QuadRule(2, pts, [1.0 / 3.0] * 3)

    pts = _orbit3(0.816847572980459, 0.091576213509771)
    pts += _orbit3(0.108103018168070, 0.445948490915965)
    w = [0.109951743655322] * 3 + [0.223381589678011] * 3
    rules[4] = QuadRule(4, pts, w)

    pts = _orbit3(0.873821971016996, 0.063089014491502)
    pts += _orbit3(0.501426509658179, 0.249286745170910)
    pts += _orbit6(0.636502499121399, 0.310352451033785, 0.053145049844816)
    w = [0.050844906370207] * 3 + [0.116786275726379] * 3 + [0.082851075618374] * 6
    rules[6] = QuadRule(6, pts, w)

    return rules


_RULES = _build_rules()


def triangle_rule(degree):
    """Return the stored rule exact for polynomials of the given degree (2, 4 or 6)."""
    if degree not in _RULES:
        raise ValueError(f"no triangle rule of degree {degree}; available: {sorted(_RULES)}")
    return _RULES[degree]


def triangle_area(tri):
    """Signed area of a triangle given as (3, 2) vertex array (positive if CCW)."""
    tri = np.asarray(tri, dtype=float)
    d1 = tri[1] - tri[0]
    d2 = tri[2] - tri[0]
    return 0.5 * (d1[0] * d2[1] - d1[1] * d2[0])


def map_to_triangle(rule, tri):
    """Map a reference rule onto a physical triangle.

    Returns (points, weights) where points has shape (n, 2) and weights already
    include the (absolute) triangle area, so integral = sum(weights * f(points)).
    """
    tri = np.asarray(tri, dtype=float)
    pts = rule.points @ tri
    w = rule.weights * abs(triangle_area(tri))
    return pts, w


def fan_triangles(poly):
    """Split a convex CCW polygon (k, 2) into triangles fanned from vertex 0."""
    poly = np.asarray(poly, dtype=float)
    return [poly[[0, i, i + 1]] for i in range(1, len(poly) - 1)]


def refine_triangle(tri):
    """Split a triangle into its 4 congruent midpoint children."""
    tri = np.asarray(tri, dtype=float)
    m01 = 0.5 * (tri[0] + tri[1])
    m12 = 0.5 * (tri[1] + tri[2])
    m20 = 0.5 * (tri[2] + tri[0])
    return [
        np.array([tri[0], m01, m20]),
        np.array([m01, tri[1], m12]),
        np.array([m20, m12, tri[2]]),
        np.array([m01, m12, m20]),
    ]


def integrate_polygon(poly, f, degree):
    """Integrate f(x, y) over a convex CCW polygon with a triangle rule.

    Parameters
    ----------
    poly : (k, 2) array of vertices, k >= 3, CCW, convex.
    f : vectorized callable f(x, y) -> array.
    degree : polynomial exactness degree, one of {2, 4, 6}.
    """
    poly = np.asarray(poly, dtype=float)
    if len(poly) < 3:
        raise ValueError("polygon needs at least 3 vertices")
    rule = triangle_rule(degree)
    total = 0.0
    for tri in fan_triangles(poly):
        pts, w = map_to_triangle(rule, tri)
        total += float(w @ np.asarray(f(pts[:, 0], pts[:, 1]), dtype=float))
    return total


def gauss_legendre_01(n):
    """Gauss-Legendre nodes and weights on [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w
