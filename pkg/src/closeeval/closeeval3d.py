"""Close evaluation of the 3D double-layer potential: the subtracted
three-step quadrature at interior points and the first asymptotic
approximation in the distance parameter.

For a boundary target y* = y(theta*, phi*) and x = y* - eps*ell*nu*, the
numerical method uses the interior Gauss identity,

    u(x) = -mu(y*) + (1/4pi) oint K(x, y) [mu(y) - mu(y*)] dsigma,

and the asymptotic method is u ~ f(y*) + eps*U1 with U1 the rotated
quadrature of K1 [mu - mu*], where, with y_d = y* - y(s, t),

    K1 = ell * [3 (nu . y_d)(nu* . y_d) - |y_d|^2 (nu . nu*)] / |y_d|^5.

Every integrand is assembled with the area element of the rotated
parameterization, which absorbs the sin(s) pole factor, so the azimuthal
averages extend continuously to the pole.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bie3d import Density3D, quadrature_nodes
from .geometry3d import Surface3D, rotated_frame, surface_point_and_normal


@dataclass(frozen=True)
class CloseEvalRequest3D:
    """One close evaluation: target parameters, distance eps, scale ell,
    and the polar quadrature size n (defaults to the density degree)."""

    density: Density3D
    theta_star: float
    phi_star: float
    eps: float
    ell: float = 1.0
    n: int = 0

    def __post_init__(self):
        if self.eps <= 0 or self.ell <= 0:
            raise ValueError("eps and ell must be positive")
        if self.n == 0:
            object.__setattr__(self, "n", self.density.N)
        if not self.density.surface.contains(self.point()):
            raise ValueError("evaluation point falls outside the domain")

    def target(self):
        return surface_point_and_normal(self.density.surface,
                                        self.theta_star, self.phi_star)

    def point(self) -> np.ndarray:
        ystar, nustar = self.target()
        return ystar - self.eps*self.ell*nustar


def _rotated_density(request: CloseEvalRequest3D):
    surface = request.density.surface
    s, ws, t = quadrature_nodes(request.n)
    y, W, nu, theta, phi = rotated_frame(surface, request.theta_star,
                                         request.phi_star,
                                         s[:, None], t[None, :])
    mu = request.density(theta, phi)
    mustar = float(request.density(np.full(1, request.theta_star),
                                   np.full(1, request.phi_star))[0])
    return s, ws, y, W, nu, mu, mustar


def dlp_numerical_3d(request: CloseEvalRequest3D) -> float:
    """Subtracted three-step quadrature at the interior point."""
    n = request.n
    _, ws, y, W, nu, mu, mustar = _rotated_density(request)
    x = request.point()
    diff = x - y
    r2 = np.sum(diff*diff, axis=-1)
    kern = np.sum(nu*diff, axis=-1)/r2**1.5
    return float(-mustar
                 + (1.0/(4*n))*np.sum(ws[:, None]*kern*W*(mu - mustar)))


def kernel_K1_3d(surface: Surface3D, s, t, theta_star: float,
                 phi_star: float, ell: float = 1.0):
    """First expansion kernel on the rotated grid about the target."""
    y, W, nu, _, _ = rotated_frame(surface, theta_star, phi_star, s, t)
    ystar, nustar = surface_point_and_normal(surface, theta_star, phi_star)
    yd = ystar - y
    r2 = np.sum(yd*yd, axis=-1)
    if np.any(r2 < 1e-28):
        raise ValueError("kernel evaluated at the coincidence point")
    nd = np.sum(nu*yd, axis=-1)
    nsd = np.sum(nustar*yd, axis=-1)
    ndot = np.sum(nu*nustar, axis=-1)
    return ell*(3*nd*nsd - r2*ndot)/r2**2.5


def asym_correction_3d(request: CloseEvalRequest3D) -> float:
    """The eps-independent correction U1: rotated quadrature of
    K1 [mu - mu*] with the pole cell regularized by the subtraction."""
    n = request.n
    s, ws, y, W, nu, mu, mustar = _rotated_density(request)
    ystar, nustar = request.target()
    yd = ystar - y
    r2 = np.sum(yd*yd, axis=-1)
    nd = np.sum(nu*yd, axis=-1)
    nsd = np.sum(nustar*yd, axis=-1)
    ndot = np.sum(nu*nustar, axis=-1)
    K1 = request.ell*(3*nd*nsd - r2*ndot)/r2**2.5
    return float((1.0/(4*n))*np.sum(ws[:, None]*K1*W*(mu - mustar)))


def azimuthal_average_profile(request: CloseEvalRequest3D) -> np.ndarray:
    """Azimuth-averaged integrand of U1 at each polar node, diagnostic for
    its continuous extension to the pole."""
    n = request.n
    s, ws, y, W, nu, mu, mustar = _rotated_density(request)
    ystar, nustar = request.target()
    yd = ystar - y
    r2 = np.sum(yd*yd, axis=-1)
    nd = np.sum(nu*yd, axis=-1)
    nsd = np.sum(nustar*yd, axis=-1)
    ndot = np.sum(nu*nustar, axis=-1)
    K1 = request.ell*(3*nd*nsd - r2*ndot)/r2**2.5
    return np.mean(K1*W*(mu - mustar), axis=1)


def asym_eps2_3d(request: CloseEvalRequest3D, f_star: float = None) -> float:
    """Asymptotic approximation u ~ f(y*) + eps*U1.

    f_star overrides the boundary datum at the target; by default it comes
    from the data sampler attached to the density.
    """
    if f_star is None:
        if request.density.data is None:
            raise ValueError("density carries no data sampler; pass f_star")
        f_star = float(np.asarray(
            request.density.data(np.full(1, request.theta_star),
                                 np.full(1, request.phi_star))).ravel()[0])
    return float(f_star + request.eps*asym_correction_3d(request))
