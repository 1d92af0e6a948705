"""Uniform unfitted triangular meshes on axis-aligned rectangles.

The rectangle is divided into n x n equal cells and every cell is split along
its top-left to bottom-right diagonal.  Node ids are row-major (x fastest),
triangle ids are cell-major with the lower triangle before the upper one, and
edge ids follow first-discovery order of a sweep over triangles and their local
edges.  All incidence arrays are plain numpy integer arrays so downstream
assembly can fancy-index without per-element Python work.
"""

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

__all__ = ["UniformMesh", "build_uniform_mesh", "element_diameter"]


@dataclass
class UniformMesh:
    """Unfitted uniform triangulation of a rectangle.

    Attributes
    ----------
    n_per_side : int
        Number of cells per side.
    domain : tuple
        (xmin, xmax, ymin, ymax).
    nodes : ndarray, shape (n_nodes, 2)
        Vertex coordinates, row-major over the grid.
    triangles : ndarray, shape (n_triangles, 3)
        CCW vertex ids; triangle 2c is the lower triangle of cell c, 2c+1 the
        upper one.  Local edge k connects local vertices k and (k+1) % 3.
    tri_edges : ndarray, shape (n_triangles, 3)
        Global edge id of each local edge.
    edges : ndarray, shape (n_edges, 2)
        Vertex ids (lo, hi) per edge, in discovery order.
    edge_tris : ndarray, shape (n_edges, 2)
        Incident triangle ids, -1 padding for boundary edges.
    edge_boundary : ndarray of bool, shape (n_edges,)
        True where the edge lies on the rectangle boundary.
    """

    n_per_side: int
    domain: tuple
    nodes: np.ndarray
    triangles: np.ndarray
    tri_edges: np.ndarray
    edges: np.ndarray
    edge_tris: np.ndarray
    edge_boundary: np.ndarray
    dx: float = field(init=False, default=0.0)
    dy: float = field(init=False, default=0.0)

    def __post_init__(self):
        xmin, xmax, ymin, ymax = self.domain
        self.dx = (xmax - xmin) / self.n_per_side
        self.dy = (ymax - ymin) / self.n_per_side

    @property
    def n_nodes(self):
        return len(self.nodes)

    @property
    def n_triangles(self):
        return len(self.triangles)

    @property
    def n_edges(self):
        return len(self.edges)

    @property
    def h(self):
        """Mesh size: the diagonal length of one cell (the longest edge)."""
        return float(np.hypot(self.dx, self.dy))

    @cached_property
    def tri_coords(self):
        """Vertex coordinates per triangle, shape (n_triangles, 3, 2)."""
        return self.nodes[self.triangles]

    @cached_property
    def edge_lengths(self):
        d = self.nodes[self.edges[:, 1]] - self.nodes[self.edges[:, 0]]
        return np.hypot(d[:, 0], d[:, 1])

    def points_of(self, t):
        """(3, 2) vertex coordinates of triangle t."""
        return self.nodes[self.triangles[t]]


def build_uniform_mesh(domain, n_per_side):
    """Build the uniform unfitted mesh.

    Parameters
    ----------
    domain : (xmin, xmax, ymin, ymax) with xmin < xmax and ymin < ymax.
    n_per_side : int >= 1, number of cells per side.

    Returns
    -------
    UniformMesh with 2*n^2 triangles, (n+1)^2 nodes and 2n(n+1) + n^2 edges.
    """
    xmin, xmax, ymin, ymax = (float(v) for v in domain)
    n = int(n_per_side)
    if n < 1:
        raise ValueError(f"n_per_side must be >= 1, got {n_per_side}")
    if not (xmin < xmax and ymin < ymax):
        raise ValueError(f"degenerate domain {domain}")

    xs = np.linspace(xmin, xmax, n + 1)
    ys = np.linspace(ymin, ymax, n + 1)
    X, Y = np.meshgrid(xs, ys)
    nodes = np.column_stack([X.ravel(), Y.ravel()])

    # node(i, j) = j*(n+1) + i; cells row-major, two triangles per cell
    i, j = np.meshgrid(np.arange(n), np.arange(n))
    i = i.ravel()
    j = j.ravel()
    bl = j * (n + 1) + i
    br = bl + 1
    tl = bl + (n + 1)
    tr = tl + 1

    n_tri = 2 * n * n
    triangles = np.empty((n_tri, 3), dtype=np.int64)
    triangles[0::2] = np.column_stack([bl, br, tl])  # lower: diagonal is local edge 1
    triangles[1::2] = np.column_stack([br, tr, tl])  # upper: diagonal is local edge 2

    # edge discovery sweep: triangles in order, local edges 0, 1, 2
    a = triangles
    b = np.roll(triangles, -1, axis=1)
    lo = np.minimum(a, b).ravel()
    hi = np.maximum(a, b).ravel()
    keys = lo.astype(np.int64) * len(nodes) + hi
    unique_keys, first_idx, inverse = np.unique(keys, return_index=True, return_inverse=True)
    order = np.argsort(first_idx, kind="stable")
    rank = np.empty_like(order)
    rank[order] = np.arange(len(order))
    tri_edges = rank[inverse].reshape(n_tri, 3)
    edges = np.column_stack([lo[first_idx[order]], hi[first_idx[order]]])

    visit_edge = rank[inverse]
    visit_tri = np.arange(3 * n_tri) // 3
    by_edge = np.argsort(visit_edge, kind="stable")
    counts = np.bincount(visit_edge, minlength=len(edges))
    starts = np.concatenate([[0], np.cumsum(counts)])[:-1]
    edge_tris = np.full((len(edges), 2), -1, dtype=np.int64)
    edge_tris[:, 0] = visit_tri[by_edge[starts]]
    interior = counts == 2
    edge_tris[interior, 1] = visit_tri[by_edge[starts[interior] + 1]]

    return UniformMesh(
        n_per_side=n,
        domain=(xmin, xmax, ymin, ymax),
        nodes=nodes,
        triangles=triangles,
        tri_edges=tri_edges,
        edges=edges,
        edge_tris=edge_tris,
        edge_boundary=~interior,
    )


def element_diameter(mesh, t):
    """Longest edge length of triangle t (equals mesh.h on this mesh family)."""
    pts = mesh.points_of(t)
    d = pts - pts[[1, 2, 0]]
    return float(np.max(np.hypot(d[:, 0], d[:, 1])))
