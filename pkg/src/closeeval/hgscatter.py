"""Forward-peaked scattering toolbox: the Henyey-Greenstein phase function,
the scattering operator L, its nonlocal leading-order operator, the
two-term asymptotic expansion in eps = 1 - g, and the Poisson-kernel
connection on the unit sphere.

With p the HG phase function and Omega' . Omega = cos(s),

    L psi (Omega) = (1/4pi) int p(Omega . Omega') [psi(Omega') - psi(Omega)] dsigma'

has eigenvalues g^n - 1 on spherical harmonics of degree n.  As g -> 1 the
operator is approximated by

    L psi ~ (eps + eps^2) L32 psi - (eps^2/2) Lap_S2 psi,

where L32 (eigenvalues -n) integrates the pole-even part of psi against
(1 - cos s)^{-3/2} and Lap_S2 is the spherical Laplacian.  The Poisson
kernel for the unit ball at radius 1 - eps coincides with p at g = 1 - eps,
which is what connects the scattering expansion to close evaluation of
harmonic functions.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .geometry3d import rotated_angles
from .spectral import (SphericalCoeffs, mapped_rule, periodic_nodes,
                       spherical_laplacian, sph_synthesis)


@dataclass(frozen=True)
class HGParams:
    """Anisotropy factor g in (-1, 1); eps = 1 - g in the forward-peaked
    regime."""

    g: float

    def __post_init__(self):
        if not -1 < self.g < 1:
            raise ValueError("anisotropy factor must satisfy |g| < 1")

    @property
    def eps(self) -> float:
        return 1.0 - self.g


@dataclass
class IntensityField:
    """Direction-dependent intensity as a truncated harmonic expansion."""

    coeffs: SphericalCoeffs

    @property
    def N(self) -> int:
        return self.coeffs.N

    def __call__(self, theta, phi) -> np.ndarray:
        return np.real(sph_synthesis(self.coeffs, theta, phi))


def p_hg(cos_theta, g: float):
    """Henyey-Greenstein phase function (1-g^2)/(1+g^2-2g cos)^{3/2},
    normalized so that (1/2) int_0^pi p sin = 1."""
    if not -1 < g < 1:
        raise ValueError("anisotropy factor must satisfy |g| < 1")
    c = np.asarray(cos_theta, dtype=float)
    if np.any(np.abs(c) > 1 + 1e-12):
        raise ValueError("cosine argument outside [-1, 1]")
    return (1.0 - g*g)/(1.0 + g*g - 2.0*g*np.clip(c, -1.0, 1.0))**1.5


def _ring_average(psi: IntensityField, omega, s_nodes, n_azimuth: int):
    """Azimuthal means of psi on polar rings about omega, and psi(omega)."""
    theta0, phi0 = float(omega[0]), float(omega[1])
    t = periodic_nodes(n_azimuth)
    th, ph = rotated_angles(s_nodes[:, None], t[None, :], theta0, phi0)
    vals = psi(th, ph)
    psi0 = float(psi(np.full(1, theta0), np.full(1, phi0))[0])
    return vals.mean(axis=1), psi0


def _ring_average_sub(psi, omega, s_nodes, n_azimuth):
    az, psi0 = _ring_average(psi, omega, s_nodes, n_azimuth)
    return az - psi0, psi0

def _polar_default(psi: IntensityField, peak_eps: float):
    # enough polar nodes to resolve both the field and the kernel peak
    return max(64, 2*psi.N, int(np.ceil(8.0/max(peak_eps, 1e-6))))

def _azimuth_default(psi: IntensityField) -> int:
    return max(16, 2*psi.N)


def apply_L_direct(psi: IntensityField, omega, g: float,
                   n_polar: int = None, n_azimuth: int = None) -> float:
    """Scattering operator by quadrature in the frame with omega at the pole.

    Spectrally accurate for band-limited psi once the polar rule resolves
    the kernel peak of width 1 - g.
    """
    if not -1 < g < 1:
        raise ValueError("anisotropy factor must satisfy |g| < 1")
    if n_polar is None:
        n_polar = _polar_default(psi, 1.0 - abs(g))
    elif g > 1.0 - 2.0/n_polar:
        warnings.warn("polar rule too coarse for the phase-function peak",
                      RuntimeWarning)
    if n_azimuth is None:
        n_azimuth = _azimuth_default(psi)
    rule = mapped_rule(n_polar)
    az, _ = _ring_average_sub(psi, omega, rule.nodes, n_azimuth)
    kern = p_hg(np.cos(rule.nodes), g)
    return float(0.5*np.sum(rule.weights*kern*az*np.sin(rule.nodes)))


def apply_L32(psi: IntensityField, omega, n_polar: int = 64,
              n_azimuth: int = None) -> float:
    """Nonlocal leading-order operator: integral of the azimuth-averaged,
    pole-subtracted field against (1 - cos s)^{-3/2} sin s / (2 sqrt 2).

    The averaged integrand extends continuously to the pole (it limits to
    a multiple of the spherical Laplacian), and the open polar rule never
    places a node at s = 0.
    """
    if n_azimuth is None:
        n_azimuth = _azimuth_default(psi)
    rule = mapped_rule(n_polar)
    az, _ = _ring_average_sub(psi, omega, rule.nodes, n_azimuth)
    kern = (1.0 - np.cos(rule.nodes))**-1.5
    return float(np.sum(rule.weights*kern*az*np.sin(rule.nodes))
                 / (2.0*np.sqrt(2.0)))


def apply_L_asymptotic(psi: IntensityField, omega, eps: float,
                       n_polar: int = 64) -> float:
    """Two-term forward-peaked expansion (eps + eps^2) L32 - (eps^2/2) Lap."""
    if not 0 < eps < 0.5:
        raise ValueError("expansion parameter must lie in (0, 0.5)")
    lap = IntensityField(spherical_laplacian(psi.coeffs))
    lap0 = float(lap(np.full(1, omega[0]), np.full(1, omega[1]))[0])
    l32 = apply_L32(psi, omega, n_polar=n_polar)
    return float((eps + eps*eps)*l32 - 0.5*eps*eps*lap0)


def poisson_close_eval(f: SphericalCoeffs, ystar, eps: float,
                       n_polar: int = None, n_azimuth: int = None) -> float:
    """Harmonic extension of boundary data f on the unit sphere, evaluated
    at radius 1 - eps along the direction ystar = (theta*, phi*).

    The Poisson kernel equals the HG phase function at g = 1 - eps, so this
    is the same ring quadrature as the scattering operator, without the
    pole subtraction.  Equals sum c_nm (1-eps)^n Y_nm(ystar).
    """
    if not 0 < eps < 1:
        raise ValueError("depth parameter must lie in (0, 1)")
    field = IntensityField(f)
    if n_polar is None:
        n_polar = _polar_default(field, eps)
    if n_azimuth is None:
        n_azimuth = _azimuth_default(field)
    rule = mapped_rule(n_polar)
    az, _ = _ring_average(field, ystar, rule.nodes, n_azimuth)
    kern = p_hg(np.cos(rule.nodes), 1.0 - eps)
    return float(0.5*np.sum(rule.weights*kern*az*np.sin(rule.nodes)))
