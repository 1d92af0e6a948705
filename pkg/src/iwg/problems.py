"""Benchmark interface problems with manufactured exact solutions.

Each problem bundles the diffusion pair (beta_minus inside, beta_plus outside),
the level set, piecewise source and exact solution callables, and Dirichlet
data.  All callables are vectorized over numpy arrays.  Side selection by
convention: points with phi <= 0 belong to the minus subdomain.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

__all__ = ["InterfaceProblem", "problem_circle", "problem_petal", "problem_corner",
           "PROBLEMS"]


@dataclass
class InterfaceProblem:
    """Elliptic interface problem -div(beta grad u) = f with Dirichlet data."""

    name: str
    domain: tuple
    beta_minus: float
    beta_plus: float
    phi: Callable
    f_minus: Callable
    f_plus: Callable
    u_minus: Optional[Callable] = None
    u_plus: Optional[Callable] = None
    grad_u_minus: Optional[Callable] = None
    grad_u_plus: Optional[Callable] = None
    g: Optional[Callable] = None
    default_levels: tuple = (16, 32, 64, 128)
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.beta_minus <= 0 or self.beta_plus <= 0:
            raise ValueError(
                f"diffusion coefficients must be positive, got "
                f"({self.beta_minus}, {self.beta_plus})"
            )

    @property
    def has_exact(self):
        return all(fn is not None for fn in
                   (self.u_minus, self.u_plus, self.grad_u_minus, self.grad_u_plus))

    def beta(self, sign):
        return self.beta_plus if sign > 0 else self.beta_minus

    def _select(self, fm, fp, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        plus = np.asarray(self.phi(x, y)) > 0.0
        return np.where(plus, fp(x, y), fm(x, y))

    def f(self, x, y):
        """Source, side-selected by the sign of phi."""
        return self._select(self.f_minus, self.f_plus, x, y)

    def u(self, x, y):
        return self._select(self.u_minus, self.u_plus, x, y)

    def grad_u(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        plus = np.asarray(self.phi(x, y)) > 0.0
        gm = self.grad_u_minus(x, y)
        gp = self.grad_u_plus(x, y)
        return (np.where(plus, gp[0], gm[0]), np.where(plus, gp[1], gm[1]))

    def boundary_value(self, x, y):
        """Dirichlet data: explicit g if given, else the exact solution trace."""
        if self.g is not None:
            return self.g(x, y)
        return self.u(x, y)


def problem_circle(beta_minus, beta_plus, r0=math.pi / 5.0, alpha=5.0):
    """Circular interface of radius r0 in (-1,1)^2 with u = r^alpha / beta per side."""
    bm, bp = float(beta_minus), float(beta_plus)
    if bm <= 0.0 or bp <= 0.0:
        raise ValueError(
            f"diffusion coefficients must be positive, got ({bm}, {bp})")
    c0 = (1.0 / bm - 1.0 / bp) * r0 ** alpha

    def phi(x, y):
        return np.asarray(x) ** 2 + np.asarray(y) ** 2 - r0 ** 2

    def r_pow(x, y, p):
        return (np.asarray(x) ** 2 + np.asarray(y) ** 2) ** (p / 2.0)

    # -div(beta grad (r^alpha / beta)) = -alpha^2 r^(alpha-2) on either side
    def f_any(x, y):
        return -(alpha ** 2) * r_pow(x, y, alpha - 2.0)

    def u_m(x, y):
        return r_pow(x, y, alpha) / bm

    def u_p(x, y):
        return r_pow(x, y, alpha) / bp + c0

    def grad_m(x, y):
        s = alpha * r_pow(x, y, alpha - 2.0) / bm
        return (s * np.asarray(x), s * np.asarray(y))

    def grad_p(x, y):
        s = alpha * r_pow(x, y, alpha - 2.0) / bp
        return (s * np.asarray(x), s * np.asarray(y))

    return InterfaceProblem(
        name="circle", domain=(-1.0, 1.0, -1.0, 1.0),
        beta_minus=bm, beta_plus=bp, phi=phi,
        f_minus=f_any, f_plus=f_any,
        u_minus=u_m, u_plus=u_p, grad_u_minus=grad_m, grad_u_plus=grad_p,
        params={"r0": r0, "alpha": alpha},
    )


def problem_petal(beta_minus, beta_plus):
    """Six-petal flower interface: phi = r^4 (1 + 0.4 sin 6t) - 0.3, u = phi / beta."""
    bm, bp = float(beta_minus), float(beta_plus)

    def phi(x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        r2 = x * x + y * y
        return r2 * r2 * (1.0 + 0.4 * np.sin(6.0 * np.arctan2(y, x))) - 0.3

    def grad_phi(x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        r2 = x * x + y * y
        t6 = 6.0 * np.arctan2(y, x)
        s, c = np.sin(t6), np.cos(t6)
        gx = 4.0 * x * r2 * (1.0 + 0.4 * s) - 2.4 * y * r2 * c
        gy = 4.0 * y * r2 * (1.0 + 0.4 * s) + 2.4 * x * r2 * c
        return gx, gy

    # laplacian(phi) = 16 r^2 - 8 r^2 sin 6t, so f = -laplacian(phi) per side
    def f_any(x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        r2 = x * x + y * y
        return 8.0 * r2 * np.sin(6.0 * np.arctan2(y, x)) - 16.0 * r2

    def u_m(x, y):
        return phi(x, y) / bm

    def u_p(x, y):
        return phi(x, y) / bp

    def grad_m(x, y):
        gx, gy = grad_phi(x, y)
        return (gx / bm, gy / bm)

    def grad_p(x, y):
        gx, gy = grad_phi(x, y)
        return (gx / bp, gy / bp)

    return InterfaceProblem(
        name="petal", domain=(-1.0, 1.0, -1.0, 1.0),
        beta_minus=bm, beta_plus=bp, phi=phi,
        f_minus=f_any, f_plus=f_any,
        u_minus=u_m, u_plus=u_p, grad_u_minus=grad_m, grad_u_plus=grad_p,
    )


def problem_corner(beta_minus, beta_plus, theta=math.pi / 6.0):
    """Sharp wedge interface phi = -y^2 + tan^2(theta) (x-1)^2 x, u = phi / beta.

    The wedge has a cusp at the origin and touches the boundary at (1, 0);
    odd mesh ladders (17, 33, 65, 129) keep both features off node lines.
    """
    bm, bp = float(beta_minus), float(beta_plus)
    t = math.tan(theta) ** 2

    def phi(x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return -y * y + t * (x - 1.0) ** 2 * x

    def grad_phi(x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return (t * (3.0 * x * x - 4.0 * x + 1.0), -2.0 * y)

    # laplacian(phi) = t (6x - 4) - 2
    def f_any(x, y):
        x = np.asarray(x, dtype=float)
        return (2.0 - t * (6.0 * x - 4.0)) * np.ones_like(np.asarray(y, dtype=float))

    def u_m(x, y):
        return phi(x, y) / bm

    def u_p(x, y):
        return phi(x, y) / bp

    def grad_m(x, y):
        gx, gy = grad_phi(x, y)
        return (gx / bm, gy / bm)

    def grad_p(x, y):
        gx, gy = grad_phi(x, y)
        return (gx / bp, gy / bp)

    return InterfaceProblem(
        name="corner", domain=(-1.0, 1.0, -1.0, 1.0),
        beta_minus=bm, beta_plus=bp, phi=phi,
        f_minus=f_any, f_plus=f_any,
        u_minus=u_m, u_plus=u_p, grad_u_minus=grad_m, grad_u_plus=grad_p,
        default_levels=(17, 33, 65, 129),
        params={"theta": theta},
    )


PROBLEMS = {
    "circle": problem_circle,
    "petal": problem_petal,
    "corner": problem_corner,
}
