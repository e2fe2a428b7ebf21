"""Galerkin solution of the 3D boundary integral equation in spherical-
harmonic coefficient space.

The double-layer operator is applied by a three-step quadrature: rotate the
parameter sphere so the singular point sits at the pole, average the
subtracted integrand over the azimuth with a 2N-point trapezoid rule, then
integrate the polar angle with an N-point mapped Gauss-Legendre rule.  The
subtraction uses the on-boundary Gauss identity, so the operator value for
a function g at a boundary point y0 is

    K g (y0) = (1/4pi) oint K(y0, y) [g(y) - g(y0)] dsigma  -  g(y0)/2.

Each Galerkin column applies the operator to one basis harmonic, which is
evaluable anywhere in closed form; the projection grid uses Gauss-Legendre
colatitudes so that analysis is exact for band-limited columns.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .geometry3d import Surface3D, direction, rotated_frame, surface_point_and_normal
from .spectral import (SphericalCoeffs, analysis_grid, mapped_rule,
                       periodic_nodes, sph_basis_matrix, sph_synthesis)


@dataclass
class Density3D:
    """Spherical-harmonic density representation tied to a surface, with
    the Dirichlet data sampler that produced it (None when unknown)."""

    surface: Surface3D
    coeffs: SphericalCoeffs
    data: Callable = None

    @property
    def N(self) -> int:
        return self.coeffs.N

    def __call__(self, theta, phi) -> np.ndarray:
        """Real density values at arbitrary parameters."""
        return np.real(sph_synthesis(self.coeffs, theta, phi))

    def save(self, path: str) -> None:
        rows = []
        for n in range(self.N):
            for m in range(-n, n + 1):
                c = self.coeffs.get(n, m)
                rows.append([n, m, float(c.real), float(c.imag)])
        with open(path, "w") as fh:
            json.dump({"N": self.N, "coeffs": rows}, fh)

    @classmethod
    def load(cls, path: str, surface: Surface3D,
             data: Callable = None) -> "Density3D":
        with open(path) as fh:
            payload = json.load(fh)
        out = SphericalCoeffs.zeros(int(payload["N"]))
        for n, m, re, im in payload["coeffs"]:
            out.c[SphericalCoeffs.index(int(n), int(m))] = re + 1j*im
        return cls(surface, out, data)


def quadrature_nodes(n: int):
    """Polar Gauss-Legendre nodes/weights on [0, pi] and 2n azimuth nodes."""
    rule = mapped_rule(n)
    return rule.nodes, rule.weights, periodic_nodes(2*n)


def subtracted_weights(surface: Surface3D, theta0: float, phi0: float,
                       n: int):
    """Kernel-times-area quadrature row for the rotated grid about a
    boundary target: entries (1/4pi) w_j dt K(y0, y_jk) W_jk, plus the node
    parameters needed to sample densities there."""
    s, ws, t = quadrature_nodes(n)
    y, W, nu, theta, phi = rotated_frame(surface, theta0, phi0,
                                         s[:, None], t[None, :])
    y0, _ = surface_point_and_normal(surface, theta0, phi0)
    diff = y0 - y
    r2 = np.sum(diff*diff, axis=-1)
    kern = np.sum(nu*diff, axis=-1)/r2**1.5
    kw = (1.0/(4*n))*(ws[:, None]*kern*W)
    return kw, theta, phi


def apply_K_subtracted(surface: Surface3D, g: Callable, theta0: float,
                       phi0: float, n: int) -> float:
    """Boundary double-layer operator applied to g at (theta0, phi0).

    g(theta, phi) must be evaluable at arbitrary parameters.  The subtracted
    integrand vanishes when g is constant, so constants map to -g/2 exactly
    up to roundoff.
    """
    kw, theta, phi = subtracted_weights(surface, theta0, phi0, n)
    g0 = complex(np.asarray(g(np.full(1, theta0), np.full(1, phi0))).ravel()[0])
    vals = np.asarray(g(theta, phi))
    out = np.sum(kw*(vals - g0)) - 0.5*g0
    return out if np.iscomplexobj(vals) else float(np.real(out))


def assemble_galerkin(surface: Surface3D, n: int) -> np.ndarray:
    """Dense coefficient-space matrix of (K - 1/2 I), size n^2 by n^2.

    Column (n', m') holds the spherical analysis of the grid function
    produced by applying the boundary operator to Y_{n'm'} and subtracting
    half the harmonic again.
    """
    if n > 32:
        raise ValueError("coefficient degree beyond desk scale")
    theta_g, wth, phi_g = analysis_grid(n)
    TH, PH = np.meshgrid(theta_g, phi_g, indexing="ij")
    nb = n*n
    G = sph_basis_matrix(TH, PH, n)  # basis at the projection nodes
    V = np.empty((n*2*n, nb), dtype=complex)
    flat_th, flat_ph = TH.ravel(), PH.ravel()
    for row in range(n*2*n):
        kw, theta, phi = subtracted_weights(surface, flat_th[row],
                                            flat_ph[row], n)
        B = sph_basis_matrix(theta, phi, n)
        kwf = kw.ravel()
        # operator applied to every basis column at once:
        # sum kw (Y - Y0)  -  Y0/2  -  Y0/2
        V[row, :] = B.T @ kwf - G[row, :]*(np.sum(kwf) + 1.0)
    wrow = np.repeat(wth, 2*n)*(np.pi/n)
    return (np.conj(G)*wrow[:, None]).T @ V


def project_boundary_data(f: Callable, n: int) -> SphericalCoeffs:
    """Spherical analysis of boundary data sampled on the projection grid."""
    theta_g, wth, phi_g = analysis_grid(n)
    TH, PH = np.meshgrid(theta_g, phi_g, indexing="ij")
    G = sph_basis_matrix(TH, PH, n)
    wrow = np.repeat(wth, 2*n)*(np.pi/n)
    vals = np.asarray(f(TH, PH)).ravel()
    return SphericalCoeffs(n, (np.conj(G)*wrow[:, None]).T @ vals)


def solve_density3d(surface: Surface3D, f: Callable, n: int,
                    matrix: np.ndarray = None) -> Density3D:
    """Solve (K - 1/2 I) mu = f for the density coefficients.

    f(theta, phi) samples the Dirichlet data at surface parameters.  Pass a
    precomputed Galerkin matrix to skip assembly (it dominates the cost).
    """
    A = assemble_galerkin(surface, n) if matrix is None else matrix
    fhat = project_boundary_data(f, n)
    muhat = np.linalg.solve(A, fhat.c)
    resid = np.max(np.abs(A @ muhat - fhat.c))
    if resid > 1e-10*max(np.max(np.abs(fhat.c)), 1.0):
        raise RuntimeError(f"Galerkin solve residual too large: {resid:.3e}")
    return Density3D(surface, SphericalCoeffs(n, muhat), f)


def harmonic_point_source_3d(surface: Surface3D, source) -> Callable:
    """Boundary sampler of u(x) = 1/|x - source| for an exterior source."""
    src = np.asarray(source, dtype=float)
    if surface.contains(src):
        raise ValueError("source point must lie outside the surface")

    def data(theta, phi):
        y = surface.point_of_direction(direction(theta, phi))
        return 1.0/np.linalg.norm(y - src, axis=-1)

    return data


def exact_point_source_3d(x, source) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return 1.0/np.linalg.norm(x - np.asarray(source, dtype=float), axis=-1)


def dlp_far_3d(density: Density3D, x, n: int = 32,
               pole=(0.9, 0.3)) -> float:
    """Plain three-step quadrature of the double-layer potential at an
    interior point well separated from the boundary."""
    s, ws, t = quadrature_nodes(n)
    y, W, nu, theta, phi = rotated_frame(density.surface, pole[0], pole[1],
                                         s[:, None], t[None, :])
    mu = density(theta, phi)
    x = np.asarray(x, dtype=float)
    diff = x - y
    r2 = np.sum(diff*diff, axis=-1)
    kern = np.sum(nu*diff, axis=-1)/r2**1.5
    return float((1.0/(4*n))*np.sum(ws[:, None]*kern*W*mu))


def gauss_interior_value_3d(surface: Surface3D, x, n: int,
                            pole=(1.0, 0.5)) -> float:
    """Three-step quadrature of the unit-density double-layer potential at
    an interior point; equals -1 up to quadrature error."""
    s, ws, t = quadrature_nodes(n)
    y, W, nu, _, _ = rotated_frame(surface, pole[0], pole[1],
                                   s[:, None], t[None, :])
    x = np.asarray(x, dtype=float)
    diff = x - y
    r2 = np.sum(diff*diff, axis=-1)
    kern = np.sum(nu*diff, axis=-1)/r2**1.5
    return float((1.0/(4*n))*np.sum(ws[:, None]*kern*W))
