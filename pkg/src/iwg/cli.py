"""Command line interface: convergence studies with optional exports."""

import math
import os

import click

from .problems import PROBLEMS, problem_corner
from .solver import SolverConfig
from .study import StudyConfig, format_table, run_study
from .vtk_export import export_field


@click.group()
def main():
    """Immersed weak Galerkin benchmarks for elliptic interface problems."""


@main.command()
@click.option("--problem", "problem_name", type=click.Choice(sorted(PROBLEMS)),
              required=True, help="Benchmark problem.")
@click.option("--beta-minus", type=float, required=True,
              help="Diffusion coefficient inside the interface.")
@click.option("--beta-plus", type=float, required=True,
              help="Diffusion coefficient outside the interface.")
@click.option("--levels", type=str, default=None,
              help="Comma separated mesh ladder, e.g. 16,32,64,128.")
@click.option("--rho", type=float, default=10.0, show_default=True,
              help="Stabilization parameter.")
@click.option("--theta", type=float, default=math.pi / 6.0, show_default="pi/6",
              help="Wedge half-angle (corner problem only).")
@click.option("--solver", "solver_method",
              type=click.Choice(["auto", "direct", "cg"]), default="auto",
              show_default=True)
@click.option("--tol", type=float, default=1e-12, show_default=True,
              help="Iterative solver tolerance.")
@click.option("--format", "fmt", type=click.Choice(["csv", "md"]), default="csv",
              show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Write the table here instead of stdout.")
@click.option("--export-field", "export_path", type=click.Path(dir_okay=False),
              default=None, help="Write the finest-level field as legacy VTK.")
@click.option("--figures", "figures_dir", type=click.Path(file_okay=False),
              default=None, help="Render convergence and solution figures here.")
def run(problem_name, beta_minus, beta_plus, levels, rho, theta, solver_method,
        tol, fmt, out, export_path, figures_dir):
    """Run a convergence study on a mesh ladder and report the error table."""
    if problem_name == "corner":
        problem = problem_corner(beta_minus, beta_plus, theta=theta)
    else:
        problem = PROBLEMS[problem_name](beta_minus, beta_plus)

    if levels is None:
        ladder = problem.default_levels
    else:
        try:
            ladder = tuple(int(s) for s in levels.split(","))
        except ValueError:
            raise click.BadParameter(f"could not parse levels {levels!r}")

    config = StudyConfig(
        problem=problem,
        levels=ladder,
        rho=rho,
        solver=SolverConfig(method=solver_method, tol=tol),
    )
    keep = export_path is not None or figures_dir is not None
    result = run_study(config, keep_last=keep)

    table = format_table(result, fmt=fmt)
    if out:
        with open(out, "w") as f:
            f.write(table)
        click.echo(f"wrote {out}")
    else:
        click.echo(table, nl=False)

    if export_path:
        mesh, classes, bases, solution = result.last_state
        export_field(export_path, mesh, classes, bases, solution,
                     title=f"{problem.name} N={mesh.n_per_side}")
        click.echo(f"wrote {export_path}")

    if figures_dir:
        from .figures import save_convergence_figure, save_solution_figure

        os.makedirs(figures_dir, exist_ok=True)
        conv = os.path.join(figures_dir, f"{problem.name}_convergence.png")
        save_convergence_figure(result, conv)
        mesh, classes, bases, solution = result.last_state
        surf = os.path.join(figures_dir, f"{problem.name}_solution.png")
        save_solution_figure(mesh, classes, bases, solution, surf,
                             title=f"{problem.name} u0, N={mesh.n_per_side}")
        click.echo(f"wrote {conv}")
        click.echo(f"wrote {surf}")


if __name__ == "__main__":
    main()
