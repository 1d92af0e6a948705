"""Linear nodal bases on triangles: standard P1 and immersed (interface) P1.

Both basis kinds store per-shape-function coefficient rows (a, b, c) meaning
a + b*x + c*y in physical coordinates.  The immersed basis keeps one row set
per side of the chord; its three shape functions are nodal (delta property at
the vertices), continuous across the chord at both chord endpoints, and match
the normal flux beta * grad . n across the chord.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import SingularSystem

__all__ = ["P1Basis", "IfeBasis", "p1_coefficients", "build_p1_basis",
           "build_ife_basis", "eval_basis"]

COND_LIMIT = 1e14


def p1_coefficients(tri):
    """Coefficient rows (a, b, c) of the three nodal P1 functions on a triangle."""
    tri = np.asarray(tri, dtype=float)
    V = np.column_stack([np.ones(3), tri[:, 0], tri[:, 1]])
    return np.linalg.inv(V).T


@dataclass
class P1Basis:
    """Standard nodal P1 basis; coeffs has shape (3, 3), one row per function."""

    coeffs: np.ndarray

    def values(self, x, y, side=0):
        c = self.coeffs
        return c[:, 0, None] + c[:, 1, None] * np.atleast_1d(x) + c[:, 2, None] * np.atleast_1d(y)

    def grads(self, side=0):
        return self.coeffs[:, 1:3]

    def side_coeffs(self, side):
        return self.coeffs


@dataclass
class IfeBasis:
    """Immersed nodal basis on a cut triangle.

    coeffs_minus / coeffs_plus have shape (3, 3); d, e, normal describe the
    chord (normal points minus -> plus) and condition is the condition number
    of the defining 6x6 system.
    """

    coeffs_minus: np.ndarray
    coeffs_plus: np.ndarray
    d: np.ndarray
    e: np.ndarray
    normal: np.ndarray
    beta_minus: float
    beta_plus: float
    condition: float

    def side_coeffs(self, side):
        return self.coeffs_plus if side > 0 else self.coeffs_minus

    def chord_distance(self, x, y):
        return (np.asarray(x) - self.d[0]) * self.normal[0] + (
            np.asarray(y) - self.d[1]
        ) * self.normal[1]

    def values(self, x, y, side=None):
        """Shape-function values, shape (3, n); side=None selects by chord."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        y = np.atleast_1d(np.asarray(y, dtype=float))
        if side is None:
            plus = self.chord_distance(x, y) > 0.0
        else:
            plus = np.full(x.shape, side > 0)
        cm = self.coeffs_minus
        cp = self.coeffs_plus
        vm = cm[:, 0, None] + cm[:, 1, None] * x + cm[:, 2, None] * y
        vp = cp[:, 0, None] + cp[:, 1, None] * x + cp[:, 2, None] * y
        return np.where(plus[None, :], vp, vm)

    def grads(self, side):
        return self.side_coeffs(side)[:, 1:3]


def build_p1_basis(tri):
    return P1Basis(coeffs=p1_coefficients(tri))


def build_ife_basis(tri, cut, beta_minus, beta_plus):
    """Solve the 6x6 defining system of the immersed basis on a cut triangle.

    Unknown layout per shape function: (a-, b-, c-, a+, b+, c+).  Rows: three
    nodal conditions (each vertex interpolated with the piece of its chord
    side), continuity at both chord endpoints, and normal-flux continuity with
    the chord normal.  One factorization serves all three right-hand sides.
    Raises SingularSystem when the (flux-normalized) system conditioning
    exceeds COND_LIMIT.
    """
    tri = np.asarray(tri, dtype=float)
    d, e, n = cut.d, cut.e, cut.normal
    bmax = max(beta_minus, beta_plus)

    M = np.zeros((6, 6))
    for j in range(3):
        row = np.array([1.0, tri[j, 0], tri[j, 1]])
        if cut.vertex_sides[j] < 0:
            M[j, :3] = row
        else:
            M[j, 3:] = row
    M[3] = [-1.0, -d[0], -d[1], 1.0, d[0], d[1]]
    M[4] = [-1.0, -e[0], -e[1], 1.0, e[0], e[1]]
    M[5] = [0.0, -beta_minus * n[0] / bmax, -beta_minus * n[1] / bmax,
            0.0, beta_plus * n[0] / bmax, beta_plus * n[1] / bmax]

    condition = float(np.linalg.cond(M))
    if not np.isfinite(condition) or condition > COND_LIMIT:
        raise SingularSystem(
            f"immersed basis system condition {condition:.3e} exceeds {COND_LIMIT:.0e}"
        )

    rhs = np.zeros((6, 3))
    rhs[:3] = np.eye(3)
    sol = np.linalg.solve(M, rhs)
    return IfeBasis(
        coeffs_minus=np.ascontiguousarray(sol[:3].T),
        coeffs_plus=np.ascontiguousarray(sol[3:].T),
        d=np.asarray(d, dtype=float),
        e=np.asarray(e, dtype=float),
        normal=np.asarray(n, dtype=float),
        beta_minus=float(beta_minus),
        beta_plus=float(beta_plus),
        condition=condition,
    )


def eval_basis(basis, point, side_hint=-1):
    """Values (3,) and gradients (3, 2) of a basis at one point.

    For an immersed basis the piece is chosen by the chord signed distance;
    a point on the chord (distance exactly zero) falls back to side_hint.
    """
    x, y = float(point[0]), float(point[1])
    if isinstance(basis, P1Basis):
        vals = basis.values(x, y)[:, 0]
        return vals, basis.grads().copy()
    s = float(basis.chord_distance(x, y))
    side = side_hint if s == 0.0 else (1 if s > 0.0 else -1)
    c = basis.side_coeffs(side)
    vals = c[:, 0] + c[:, 1] * x + c[:, 2] * y
    return vals, c[:, 1:3].copy()
