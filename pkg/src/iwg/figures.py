"""Optional matplotlib rendering of study reports and solution fields."""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
from matplotlib.tri import Triangulation

from .vtk_export import discontinuous_triangulation

__all__ = ["save_convergence_figure", "save_solution_figure"]


def save_convergence_figure(result, path):
    """Log-log error curves over h with first and second order guides."""
    reports = [row.report for row in result.rows]
    h = np.array([r.h for r in reports])
    series = [
        ("e0_inf", [r.e0_inf for r in reports], "o-"),
        ("eb_inf", [r.eb_inf for r in reports], "s-"),
        ("e0_l2", [r.e0_l2 for r in reports], "^-"),
        ("e0_h1", [r.e0_h1 for r in reports], "v-"),
    ]
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    for label, vals, style in series:
        ax.loglog(h, vals, style, label=label)
    ref = np.array([h[0], h[-1]])
    anchor = max(reports[0].e0_h1, 1e-16)
    ax.loglog(ref, anchor * (ref / ref[0]), "k--", lw=0.8, label="order 1")
    anchor2 = max(reports[0].e0_l2, 1e-16)
    ax.loglog(ref, anchor2 * (ref / ref[0]) ** 2, "k:", lw=0.8, label="order 2")
    ax.set_xlabel("h")
    ax.set_ylabel("error")
    ax.set_title(f"{result.config.problem.name}: convergence")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_solution_figure(mesh, classes, bases, solution, path, title="u0"):
    """Surface plot of the piecewise interior field (jumps preserved)."""
    points, cells, values, _ = discontinuous_triangulation(
        mesh, classes, bases, solution
    )
    tri = Triangulation(points[:, 0], points[:, 1], cells)
    fig = plt.figure(figsize=(6.0, 5.0))
    ax = fig.add_subplot(projection="3d")
    ax.plot_trisurf(tri, values, cmap="coolwarm", linewidth=0.0, antialiased=False)
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
