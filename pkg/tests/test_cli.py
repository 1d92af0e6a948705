"""Command line driver and field export."""

import numpy as np
import pytest
from click.testing import CliRunner

from helpers import linear_patch_problem, solved_state
from iwg.cli import main
from iwg.geometry import Regular
from iwg.problems import problem_circle
from iwg.vtk_export import discontinuous_triangulation, export_field

HEADER = "N,DOF,e0_inf,order,eb_inf,order,e0_l2,order,e0_h1,order,seconds"


def invoke(*args):
    return CliRunner().invoke(main, list(args))


BASE = ("run", "--problem", "circle", "--beta-minus", "1", "--beta-plus", "1000",
        "--levels", "4,8")


def test_run_prints_csv_table():
    result = invoke(*BASE)
    assert result.exit_code == 0, result.output
    lines = result.output.strip().split("\n")
    assert lines[0] == HEADER
    assert len(lines) == 3
    assert lines[1].startswith("4,") and lines[2].startswith("8,")


def test_run_markdown_format():
    result = invoke(*BASE, "--format", "md")
    assert result.exit_code == 0
    assert result.output.startswith("| N | DOF |")


def test_run_writes_output_file(tmp_path):
    target = tmp_path / "table.csv"
    result = invoke(*BASE, "--out", str(target))
    assert result.exit_code == 0
    assert target.read_text().startswith(HEADER)


def test_run_rejects_bad_levels():
    assert invoke("run", "--problem", "circle", "--beta-minus", "1",
                  "--beta-plus", "1000", "--levels", "8,4").exit_code != 0
    assert invoke("run", "--problem", "circle", "--beta-minus", "1",
                  "--beta-plus", "1000", "--levels", "abc").exit_code != 0


def test_run_rejects_bad_beta():
    result = invoke("run", "--problem", "circle", "--beta-minus", "-1",
                    "--beta-plus", "1000", "--levels", "4")
    assert result.exit_code != 0


def test_corner_theta_flag():
    result = invoke("run", "--problem", "corner", "--beta-minus", "1",
                    "--beta-plus", "1000", "--levels", "5,9", "--theta", "0.7")
    assert result.exit_code == 0, result.output
    assert result.output.startswith(HEADER)


def test_cg_solver_flag():
    result = invoke(*BASE, "--solver", "cg", "--tol", "1e-13")
    assert result.exit_code == 0, result.output


def test_export_field(tmp_path):
    target = tmp_path / "field.vtk"
    result = invoke(*BASE, "--export-field", str(target))
    assert result.exit_code == 0
    text = target.read_text()
    assert text.startswith("# vtk DataFile")
    assert "DATASET UNSTRUCTURED_GRID" in text
    assert "SCALARS u0" in text


def test_figures_written(tmp_path):
    figdir = tmp_path / "figs"
    result = invoke(*BASE, "--figures", str(figdir))
    assert result.exit_code == 0, result.output
    pngs = sorted(figdir.glob("*.png"))
    assert [p.name for p in pngs] == ["circle_convergence.png", "circle_solution.png"]
    for p in pngs:
        assert p.read_bytes()[:4] == b"\x89PNG"


def test_triangulation_uncut_mesh():
    problem, mesh, classes, bases, solution, _ = solved_state(linear_patch_problem, (), 1)
    points, cells, u0, sides = discontinuous_triangulation(mesh, classes, bases, solution)
    assert points.shape == (6, 2)
    assert cells.shape == (2, 3)
    assert np.all(sides == -1)
    assert np.allclose(u0, points[:, 0] + points[:, 1], atol=1e-10)


def test_triangulation_cell_count_formula():
    problem, mesh, classes, bases, solution, _ = solved_state(problem_circle, (1.0, 1000.0), 8)
    points, cells, u0, sides = discontinuous_triangulation(mesh, classes, bases, solution)
    expect = 0
    for cls in classes:
        if isinstance(cls, Regular):
            expect += 1
        else:
            expect += (len(cls.sub_minus) - 2) + (len(cls.sub_plus) - 2)
    assert cells.shape[0] == expect
    assert points.shape[0] == 3 * expect  # every cell has private points
    assert np.isfinite(u0).all()


def test_export_roundtrip(tmp_path):
    problem, mesh, classes, bases, solution, _ = solved_state(problem_circle, (1.0, 1000.0), 8)
    points, cells, u0, sides = discontinuous_triangulation(mesh, classes, bases, solution)
    target = tmp_path / "roundtrip.vtk"
    export_field(str(target), mesh, classes, bases, solution)
    lines = target.read_text().split("\n")
    npts = None
    scalars = []
    current = None
    i = 0
    while i < len(lines):
        if lines[i].startswith("POINTS"):
            npts = int(lines[i].split()[1])
        if lines[i].startswith("SCALARS"):
            current = lines[i].split()[1]
        if lines[i].startswith("LOOKUP_TABLE") and current == "u0":
            j = i + 1
            while j < len(lines) and lines[j].strip() and not lines[j][0].isalpha():
                scalars.extend(float(v) for v in lines[j].split())
                j += 1
            i = j
            continue
        i += 1
    assert npts == points.shape[0]
    assert len(scalars) == npts
    assert np.max(np.abs(np.array(scalars) - u0)) < 1e-6 * max(1.0, np.max(np.abs(u0)))
    assert np.max(np.abs(scalars)) == pytest.approx(np.max(np.abs(u0)), rel=1e-6)
