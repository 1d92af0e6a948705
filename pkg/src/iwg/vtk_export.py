"""Solution field export as legacy ASCII VTK unstructured grids.

Every element becomes one or more triangle cells with duplicated vertices so
the piecewise field can jump across element and chord boundaries: regular
elements map to one cell, cut elements to the fanned chord sub-polygons.
Point data carries the interior field u0, cell data the subdomain sign.
"""

import numpy as np

from .geometry import Regular
from .quadrature import fan_triangles

__all__ = ["discontinuous_triangulation", "export_field"]


def discontinuous_triangulation(mesh, classes, bases, solution):
    """Per-cell triangles with duplicated points.

    Returns (points (P, 2), cells (C, 3), u0 (P,), subdomain (C,)).
    """
    points = []
    cells = []
    values = []
    sides = []

    def add_tri(pts, vals, side):
        base = len(points)
        points.extend(pts)
        values.extend(vals)
        cells.append([base, base + 1, base + 2])
        sides.append(side)

    for t, cls in enumerate(classes):
        U = solution.interior[t]
        if isinstance(cls, Regular):
            # nodal basis: vertex values are the interior coefficients
            add_tri(list(mesh.points_of(t)), list(U), cls.sign)
            continue
        basis = bases[t]
        for side, poly in ((-1, cls.sub_minus), (1, cls.sub_plus)):
            c = basis.side_coeffs(side)
            for ftri in fan_triangles(poly):
                vals = U @ (c[:, 0, None] + c[:, 1, None] * ftri[:, 0]
                            + c[:, 2, None] * ftri[:, 1])
                add_tri(list(ftri), list(vals), side)

    return (np.asarray(points, dtype=float), np.asarray(cells, dtype=np.int64),
            np.asarray(values, dtype=float), np.asarray(sides, dtype=np.int64))


def export_field(path, mesh, classes, bases, solution, title="iwg field"):
    """Write the solution field to a legacy ASCII VTK file."""
    points, cells, values, sides = discontinuous_triangulation(
        mesh, classes, bases, solution
    )
    with open(path, "w") as f:
        f.write("# vtk DataFile Version 3.0\n")
        f.write(f"{title}\n")
        f.write("ASCII\n")
        f.write("DATASET UNSTRUCTURED_GRID\n")
        f.write(f"POINTS {len(points)} double\n")
        for x, y in points:
            f.write(f"{x:.16e} {y:.16e} 0.0\n")
        f.write(f"CELLS {len(cells)} {4 * len(cells)}\n")
        for a, b, c in cells:
            f.write(f"3 {a} {b} {c}\n")
        f.write(f"CELL_TYPES {len(cells)}\n")
        for _ in range(len(cells)):
            f.write("5\n")
        f.write(f"POINT_DATA {len(points)}\n")
        f.write("SCALARS u0 double 1\n")
        f.write("LOOKUP_TABLE default\n")
        for v in values:
            f.write(f"{v:.16e}\n")
        f.write(f"CELL_DATA {len(cells)}\n")
        f.write("SCALARS subdomain int 1\n")
        f.write("LOOKUP_TABLE default\n")
        for s in sides:
            f.write(f"{s}\n")
    return path
