"""Consistency audits of the built-in benchmark problems.

Each problem states phi, beta, f, and a piecewise exact solution; these tests
verify the pieces agree with each other by finite differences and verify the
interface jump conditions at sampled points of the zero level set.
"""

import numpy as np
import pytest

from iwg.problems import PROBLEMS, problem_circle, problem_corner, problem_petal


def fd_laplacian(fn, x, y, step):
    return (fn(x + step, y) + fn(x - step, y) + fn(x, y + step) + fn(x, y - step)
            - 4.0 * fn(x, y)) / step ** 2


def fd_gradient(fn, x, y, step):
    return np.array([
        (fn(x + step, y) - fn(x - step, y)) / (2.0 * step),
        (fn(x, y + step) - fn(x, y - step)) / (2.0 * step),
    ], dtype=float)


def sample_interior(problem, rng, count, sign, keep=None):
    """Points strictly inside one subdomain.

    The margin is small because the corner geometry's positive lobe is
    shallow: its level set function never exceeds ~0.05 there.
    """
    xmin, xmax, ymin, ymax = problem.domain
    out = []
    while len(out) < count:
        x = rng.uniform(xmin + 0.05, xmax - 0.05)
        y = rng.uniform(ymin + 0.05, ymax - 0.05)
        v = float(problem.phi(x, y))
        if sign * v <= 1e-3:
            continue
        if keep is not None and not keep(x, y):
            continue
        out.append((x, y))
    return out


@pytest.mark.parametrize("factory,betas", [
    (problem_circle, (1.0, 1000.0)),
    (problem_circle, (1000.0, 1.0)),
    (problem_petal, (1.0, 1000.0)),
    (problem_petal, (1000.0, 1.0)),
    (problem_corner, (1.0, 1000.0)),
    (problem_corner, (1000.0, 1.0)),
])
def test_source_matches_exact_solution(factory, betas):
    problem = factory(*betas)
    rng = np.random.default_rng(5)
    for sign, u_fn, f_fn, beta in (
        (-1, problem.u_minus, problem.f_minus, problem.beta_minus),
        (+1, problem.u_plus, problem.f_plus, problem.beta_plus),
    ):
        # r^5 has unbounded fourth-derivative ratio near the origin; stay away
        keep = (lambda x, y: x * x + y * y > 0.15 ** 2) if factory is problem_circle else None
        pts = sample_interior(problem, rng, 50, sign, keep=keep)
        for x, y in pts:
            # step 1e-4: small enough for truncation, large enough that the
            # beta factor does not amplify cancellation noise past tolerance
            lap = fd_laplacian(u_fn, x, y, 1e-4)
            fv = float(f_fn(x, y))
            assert fv == pytest.approx(-beta * lap, rel=1e-4, abs=1e-4)


def interface_points(problem, seed, count, rng):
    """Points on the zero level set, found by bisection along rays from seed."""
    xmin, xmax, ymin, ymax = problem.domain
    assert float(problem.phi(*seed)) < 0.0
    pts = []
    tries = 0
    while len(pts) < count:
        tries += 1
        assert tries < 50 * count
        angle = rng.uniform(0.0, 2.0 * np.pi)
        direction = np.array([np.cos(angle), np.sin(angle)])
        lo, hi = 0.0, None
        for t in np.linspace(0.05, 2.5, 120):
            p = np.asarray(seed) + t * direction
            if not (xmin < p[0] < xmax and ymin < p[1] < ymax):
                break
            if float(problem.phi(p[0], p[1])) > 0.0:
                hi = t
                break
            lo = t
        if hi is None:
            continue
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            p = np.asarray(seed) + mid * direction
            if float(problem.phi(p[0], p[1])) > 0.0:
                hi = mid
            else:
                lo = mid
        pts.append(np.asarray(seed) + 0.5 * (lo + hi) * direction)
    return pts


@pytest.mark.parametrize("factory,seed", [
    (problem_circle, (0.0, 0.0)),
    (problem_petal, (0.0, 0.0)),
    (problem_corner, (-0.5, 0.5)),
])
def test_interface_jump_conditions(factory, seed):
    problem = factory(1.0, 1000.0)
    rng = np.random.default_rng(11)
    maxbeta = max(problem.beta_minus, problem.beta_plus)
    for p in interface_points(problem, seed, 200, rng):
        x, y = float(p[0]), float(p[1])
        # solution continuity across the interface
        jump_u = float(problem.u_plus(x, y)) - float(problem.u_minus(x, y))
        assert abs(jump_u) < 1e-10
        # flux continuity: beta grad(u) . n with n from the level set gradient
        n = fd_gradient(problem.phi, x, y, 1e-6)
        n /= np.linalg.norm(n)
        flux_m = problem.beta_minus * fd_gradient(problem.u_minus, x, y, 1e-6) @ n
        flux_p = problem.beta_plus * fd_gradient(problem.u_plus, x, y, 1e-6) @ n
        assert abs(flux_p - flux_m) < 1e-8 * maxbeta


def test_gradients_match_finite_differences():
    rng = np.random.default_rng(7)
    for factory in (problem_circle, problem_petal, problem_corner):
        problem = factory(1.0, 1000.0)
        for sign, u_fn, g_fn in (
            (-1, problem.u_minus, problem.grad_u_minus),
            (+1, problem.u_plus, problem.grad_u_plus),
        ):
            for x, y in sample_interior(problem, rng, 20, sign):
                fd = fd_gradient(u_fn, x, y, 1e-6)
                gx, gy = g_fn(x, y)
                assert np.allclose([gx, gy], fd, rtol=1e-7, atol=1e-7)


def test_circle_closed_forms():
    problem = problem_circle(1.0, 1000.0)
    r0 = np.pi / 5.0
    # outside the circle: r^5 scaled by the outer coefficient plus the offset
    # that makes the solution continuous at r = r0
    expect = 0.8 ** 5 / 1000.0 + (1.0 - 1.0 / 1000.0) * r0 ** 5
    assert float(problem.u(0.8, 0.0)) == pytest.approx(expect, rel=1e-14)
    # inside: plain r^5 over beta_minus = 1
    assert float(problem.u(0.3, 0.0)) == pytest.approx(0.3 ** 5, rel=1e-14)
    assert float(problem.phi(r0, 0.0)) == pytest.approx(0.0, abs=1e-15)
    # f = -25 r^3 regardless of side
    r = 0.5
    assert float(problem.f(r, 0.0)) == pytest.approx(-25.0 * r ** 3, rel=1e-13)


def test_petal_closed_forms():
    problem = problem_petal(1.0, 1000.0)
    # on the positive x axis sin(6 theta) = 0: phi = (r^2)^2 - 0.3
    assert float(problem.phi(0.3, 0.0)) == pytest.approx(0.09 ** 2 - 0.3, abs=1e-15)
    assert float(problem.phi(0.3, 0.0)) == pytest.approx(-0.2919, abs=1e-10)
    # u = phi / beta on each side, so -beta lap(u) = -lap(phi) = f
    x, y = 0.5, 0.1
    lap_phi = fd_laplacian(problem.phi, x, y, 1e-4)
    assert float(problem.f_minus(x, y)) == pytest.approx(-lap_phi, rel=1e-5)
    assert abs(float(problem.u_minus(x, y)) * problem.beta_minus
               - float(problem.phi(x, y))) < 1e-14


def test_corner_closed_forms():
    problem = problem_corner(1.0, 1000.0)
    t = np.tan(np.pi / 6.0) ** 2
    ys = np.linspace(-0.9, 0.9, 7)
    assert np.allclose(problem.phi(np.zeros_like(ys), ys), -ys ** 2, atol=1e-15)
    xs = np.linspace(0.05, 0.95, 7)
    assert np.all(problem.phi(xs, np.zeros_like(xs)) > 0.0)
    # lap(phi) = -2 + t (6x - 4), checked by finite differences
    rng = np.random.default_rng(3)
    for _ in range(10):
        x, y = rng.uniform(-0.8, 0.8, size=2)
        expect = -2.0 + t * (6.0 * x - 4.0)
        assert fd_laplacian(problem.phi, x, y, 1e-4) == pytest.approx(expect, rel=1e-6)
    assert problem.default_levels == (17, 33, 65, 129)
    assert all(n % 2 == 1 for n in problem.default_levels)


def test_registry_and_validation():
    assert set(PROBLEMS) == {"circle", "petal", "corner"}
    for factory in (problem_circle, problem_petal, problem_corner):
        with pytest.raises(ValueError):
            factory(-1.0, 5.0)
        with pytest.raises(ValueError):
            factory(1.0, 0.0)
    problem = problem_circle(2.0, 3.0)
    assert problem.has_exact
    assert problem.beta(-1) == 2.0
    assert problem.beta(+1) == 3.0
    # boundary_value falls back to the exact trace unless g is supplied
    assert float(problem.boundary_value(0.9, 0.9)) == float(problem.u(0.9, 0.9))
    problem.g = lambda x, y: np.full_like(np.asarray(x, dtype=float), 42.0)
    assert float(problem.boundary_value(0.9, 0.9)) == 42.0


def test_corner_theta_parameter():
    steep = problem_corner(1.0, 1000.0, theta=np.pi / 4.0)
    assert float(steep.phi(0.5, 0.0)) == pytest.approx(0.125, rel=1e-12)
    default = problem_corner(1.0, 1000.0)
    assert float(default.phi(0.5, 0.0)) != float(steep.phi(0.5, 0.0))
