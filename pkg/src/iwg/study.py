"""Convergence studies over mesh ladders and delimited report output."""

import time
from dataclasses import dataclass, field
from typing import Optional

from .assembly import DEFAULT_RHO, build_cut_bases
from .error_analysis import compute_errors, convergence_orders
from .geometry import classify_elements
from .mesh import build_uniform_mesh
from .solver import SolverConfig, solve_problem

__all__ = ["StudyConfig", "StudyRow", "StudyResult", "run_study", "format_table"]

TABLE_COLUMNS = ["N", "DOF", "e0_inf", "order", "eb_inf", "order",
                 "e0_l2", "order", "e0_h1", "order", "seconds"]


@dataclass
class StudyConfig:
    problem: object
    levels: tuple
    rho: float = DEFAULT_RHO
    solver: SolverConfig = field(default_factory=SolverConfig)
    condense: bool = False
    cut_refine: int = 1

    def __post_init__(self):
        levels = tuple(int(n) for n in self.levels)
        if len(levels) == 0:
            raise ValueError("levels must be non-empty")
        if any(n < 1 for n in levels):
            raise ValueError(f"levels must be positive, got {levels}")
        if any(b <= a for a, b in zip(levels, levels[1:])):
            raise ValueError(f"levels must be strictly increasing, got {levels}")
        self.levels = levels


@dataclass
class StudyRow:
    report: object
    seconds: float


@dataclass
class StudyResult:
    config: StudyConfig
    rows: list
    orders: list
    last_state: Optional[tuple] = None  # (mesh, classes, bases, solution)


def run_study(config, keep_last=False):
    """Run the ladder: mesh, classify, solve and measure errors per level."""
    problem = config.problem
    rows = []
    last = None
    for n in config.levels:
        t0 = time.perf_counter()
        mesh = build_uniform_mesh(problem.domain, n)
        classes = classify_elements(mesh, problem.phi)
        bases = build_cut_bases(mesh, classes, problem)
        solution, system = solve_problem(
            mesh, classes, problem, rho=config.rho, config=config.solver,
            condense=config.condense,
        )
        report = compute_errors(
            solution, problem, mesh, classes, bases=bases,
            cut_refine=config.cut_refine, rho=config.rho,
        )
        rows.append(StudyRow(report=report, seconds=time.perf_counter() - t0))
        if keep_last:
            last = (mesh, classes, bases, solution)
    orders = convergence_orders([r.report for r in rows])
    return StudyResult(config=config, rows=rows, orders=orders, last_state=last)


def _cells(result):
    out = []
    for i, row in enumerate(result.rows):
        rep = row.report
        o = result.orders[i - 1] if i > 0 else None

        def fo(v):
            return "" if o is None else f"{v:.2f}"

        out.append([
            str(rep.n_per_side),
            str(rep.dofs),
            f"{rep.e0_inf:.2E}", fo(o.e0_inf if o else 0.0),
            f"{rep.eb_inf:.2E}", fo(o.eb_inf if o else 0.0),
            f"{rep.e0_l2:.2E}", fo(o.e0_l2 if o else 0.0),
            f"{rep.e0_h1:.2E}", fo(o.e0_h1 if o else 0.0),
            f"{row.seconds:.3f}",
        ])
    return out


def format_table(result, fmt="csv"):
    """Render the study as csv or a markdown pipe table (same cells)."""
    cells = _cells(result)
    if fmt == "csv":
        lines = [",".join(TABLE_COLUMNS)]
        lines += [",".join(row) for row in cells]
        return "\n".join(lines) + "\n"
    if fmt == "md":
        lines = ["| " + " | ".join(TABLE_COLUMNS) + " |"]
        lines.append("|" + "|".join([" --- "] * len(TABLE_COLUMNS)) + "|")
        lines += ["| " + " | ".join(c if c else " " for c in row) + " |" for row in cells]
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown table format {fmt!r}")
