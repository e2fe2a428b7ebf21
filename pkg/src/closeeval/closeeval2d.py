"""Evaluation of the 2D double-layer potential at points close to the
boundary: the plain quadrature baseline, the singularity-subtracted
quadrature, and two asymptotic approximations in the distance parameter.

The evaluation point is x = y* - eps*ell*nu* for a boundary target
y* = y(t_k) at a quadrature node.  Writing y_d = y* - y(t), the first two
kernels of the distance expansion are

    K1 = ell * [2 (nu . y_d)(nu* . y_d) - (nu . nu*) |y_d|^2] / |y_d|^4
    K2 = ell^2 * [(nu . y_d)(4 (nu* . y_d)^2 - |y_d|^2)
                  - 2 |y_d|^2 (nu . nu*)(nu* . y_d)] / |y_d|^6

and the corrected trapezoid sums replace the singular quadrature cell at
t_k by its analytic limit, contributing the local derivative terms below.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bie2d import DensityGrid2D
from .geometry2d import Curve2D, curve_eval, point_inside
from .spectral import periodic_derivative


@dataclass(frozen=True)
class CloseEvalRequest2D:
    """One close evaluation: target node index k, distance eps, scale ell."""

    density: DensityGrid2D
    k: int
    eps: float
    ell: float = 1.0

    def __post_init__(self):
        if self.eps <= 0 or self.ell <= 0:
            raise ValueError("eps and ell must be positive")
        if not 0 <= self.k < self.density.n:
            raise ValueError("target index out of range")
        if not point_inside(self.density.curve, self.point()):
            raise ValueError("evaluation point falls outside the domain")

    def target(self):
        g = self.density.geometry
        return g.position[self.k], g.normal[self.k]

    def point(self) -> np.ndarray:
        ystar, nustar = self.target()
        return ystar - self.eps*self.ell*nustar


def dlp_ptr(request: CloseEvalRequest2D) -> float:
    """Plain PTR evaluation at x; exhibits O(1) error once eps is smaller
    than the node spacing."""
    g = request.density.geometry
    diff = request.point() - g.position
    r2 = np.sum(diff*diff, axis=-1)
    K = np.sum(g.normal*diff, axis=-1)/r2
    return float(np.sum(K*g.jacobian*request.density.mu)/request.density.n)


def dlp_subtraction(request: CloseEvalRequest2D) -> float:
    """Subtracted quadrature: u = -mu* + PTR of K(x, y) [mu - mu*]."""
    g = request.density.geometry
    mu = request.density.mu
    mustar = mu[request.k]
    diff = request.point() - g.position
    r2 = np.sum(diff*diff, axis=-1)
    K = np.sum(g.normal*diff, axis=-1)/r2
    return float(-mustar + np.sum(K*g.jacobian*(mu - mustar))/request.density.n)


def kernel_K1_2d(curve: Curve2D, t, t_star: float, ell: float = 1.0):
    """First expansion kernel at parameters t for the target y(t_star)."""
    gt = curve_eval(curve, t)
    gs = curve_eval(curve, np.asarray(t_star))
    yd = gs.position - gt.position
    r2 = np.sum(yd*yd, axis=-1)
    if np.any(r2 < 1e-28):
        raise ValueError("kernel evaluated at the coincidence point")
    nd = np.sum(gt.normal*yd, axis=-1)
    nsd = np.sum(gs.normal*yd, axis=-1)
    ndot = np.sum(gt.normal*gs.normal, axis=-1)
    return ell*(2*nd*nsd - ndot*r2)/r2**2

def kernel_K2_2d(curve: Curve2D, t, t_star: float, ell: float = 1.0):
    """Second expansion kernel at parameters t for the target y(t_star)."""
    gt = curve_eval(curve, t)
    gs = curve_eval(curve, np.asarray(t_star))
    yd = gs.position - gt.position
    r2 = np.sum(yd*yd, axis=-1)
    if np.any(r2 < 1e-28):
        raise ValueError("kernel evaluated at the coincidence point")
    nd = np.sum(gt.normal*yd, axis=-1)
    nsd = np.sum(gs.normal*yd, axis=-1)
    ndot = np.sum(gt.normal*gs.normal, axis=-1)
    return ell*ell*(nd*(4*nsd*nsd - r2) - 2*r2*ndot*nsd)/r2**3


def _correction_sums(density: DensityGrid2D, k: int, ell: float,
                     second_order: bool):
    """Corrected trapezoid sums U1 (and U2 with local terms when requested).

    Both are independent of eps, so the harness reuses them across a sweep.
    """
    g = density.geometry
    n = density.n
    mu = density.mu
    mup = periodic_derivative(mu, 1)
    mupp = periodic_derivative(mu, 2)
    J_k = g.jacobian[k]

    mask = np.arange(n) != k
    ystar = g.position[k]
    nustar = g.normal[k]
    yd = ystar - g.position[mask]
    r2 = np.sum(yd*yd, axis=-1)
    nd = np.sum(g.normal[mask]*yd, axis=-1)
    nsd = nustar[0]*yd[:, 0] + nustar[1]*yd[:, 1]
    ndot = np.sum(g.normal[mask]*nustar, axis=-1)

    K1 = ell*(2*nd*nsd - ndot*r2)/r2**2
    dmu = mu[mask] - mu[k]
    U1 = np.sum(K1*g.jacobian[mask]*dmu)/n - ell*mupp[k]/(2*n*J_k)
    if not second_order:
        return U1, None

    K2 = ell*ell*(nd*(4*nsd*nsd - r2) - 2*r2*ndot*nsd)/r2**3
    U2 = np.sum(K2*g.jacobian[mask]*dmu)/n \
        - ell*ell*g.curvature[k]*mupp[k]/(4*n*J_k)
    local = -ell*ell*np.dot(g.d1[k], g.d2[k])/(4*J_k**4)*mup[k] \
        + ell*ell*mupp[k]/(4*J_k**2)
    return U1, U2 + local


def asym_eps2(request: CloseEvalRequest2D) -> float:
    """First asymptotic approximation u ~ f(y*) + eps*U1."""
    U1, _ = _correction_sums(request.density, request.k, request.ell, False)
    return float(request.density.f[request.k] + request.eps*U1)

def asym_eps3(request: CloseEvalRequest2D) -> float:
    """Second asymptotic approximation u ~ f(y*) + eps*U1 + eps^2*(U2 + local
    derivative terms)."""
    U1, U2loc = _correction_sums(request.density, request.k, request.ell, True)
    return float(request.density.f[request.k] + request.eps*U1
                 + request.eps**2*U2loc)


def asym_coefficients(density: DensityGrid2D, k: int, ell: float = 1.0):
    """(f*, U1, U2+local) for one target; the eps-independent pieces of both
    asymptotic methods, exposed for sweep reuse."""
    U1, U2loc = _correction_sums(density, k, ell, True)
    return float(density.f[k]), float(U1), float(U2loc)
