import numpy as np
import pytest
from numpy.testing import assert_allclose

from closeeval.geometry3d import rotated_angles
from closeeval.spectral import (SphericalCoeffs, analysis_grid, gauss_legendre,
                                mapped_rule, periodic_derivative,
                                periodic_nodes, pole_second_derivative_average,
                                sph_analysis, sph_basis_matrix, sph_harm_eval,
                                sph_synthesis, spherical_laplacian)


def _random_band_limited(rng, N):
    """Real random field of degree < N as coefficients."""
    c = SphericalCoeffs.zeros(N)
    for n in range(N):
        for m in range(0, n + 1):
            re, im = rng.standard_normal(2)
            if m == 0:
                im = 0.0
            c.c[SphericalCoeffs.index(n, m)] = re + 1j*im
            c.c[SphericalCoeffs.index(n, -m)] = (-1)**m*(re - 1j*im)
    return c


# ---------------------------------------------------------------- derivative

def test_derivative_of_cosine():
    t = periodic_nodes(32)
    d2 = periodic_derivative(np.cos(t), 2)
    assert_allclose(d2, -np.cos(t), atol=1e-12)
    d1 = periodic_derivative(np.cos(t), 1)
    assert_allclose(d1, -np.sin(t), atol=1e-12)


def test_derivative_of_constant_is_zero():
    for order in (1, 2):
        assert_allclose(periodic_derivative(np.full(16, 3.7), order), 0.0,
                        atol=1e-13)


def test_derivative_exp_cos_analytic():
    t = periodic_nodes(64)
    d2 = periodic_derivative(np.exp(np.cos(t)), 2)
    exact = (np.sin(t)**2 - np.cos(t))*np.exp(np.cos(t))
    assert_allclose(d2, exact, atol=1e-10)


def test_derivative_exact_for_trig_polynomials():
    n = 32
    t = periodic_nodes(n)
    rng = np.random.default_rng(0)
    v = np.zeros(n)
    d1_exact = np.zeros(n)
    for k in range(1, n//2):  # strictly below the Nyquist mode
        a, b = rng.standard_normal(2)
        v += a*np.cos(k*t) + b*np.sin(k*t)
        d1_exact += -a*k*np.sin(k*t) + b*k*np.cos(k*t)
    assert_allclose(periodic_derivative(v, 1), d1_exact, atol=1e-12*n)


def test_derivative_validates_input():
    with pytest.raises(ValueError):
        periodic_derivative(np.zeros(7), 1)
    with pytest.raises(ValueError):
        periodic_derivative(np.zeros(16), 3)


# ---------------------------------------------------------------- quadrature

def test_gauss_legendre_textbook_values():
    r1 = gauss_legendre(1)
    assert_allclose(r1.nodes, [0.0], atol=1e-15)
    assert_allclose(r1.weights, [2.0], atol=1e-15)
    r2 = gauss_legendre(2)
    assert_allclose(sorted(r2.nodes), [-1/np.sqrt(3), 1/np.sqrt(3)],
                    atol=1e-15)
    assert_allclose(r2.weights, [1.0, 1.0], atol=1e-15)


def test_gauss_legendre_degree_exactness():
    for n in (3, 8, 16):
        rule = gauss_legendre(n)
        p = 2*n - 1
        got = np.sum(rule.weights*rule.nodes**p)
        assert abs(got - 0.0) <= 1e-13  # odd power integrates to zero
        got = np.sum(rule.weights*rule.nodes**(p - 1))
        exact = 2.0/(p)  # int x^(2n-2) = 2/(2n-1)
        assert abs(got - exact) <= 1e-12*abs(exact) + 1e-14


def test_mapped_rule_integrates_sine():
    rule = mapped_rule(8)
    assert rule.domain == "[0,pi]"
    assert_allclose(np.sum(rule.weights), np.pi, atol=1e-12)
    assert_allclose(np.sum(rule.weights*np.sin(rule.nodes)), 2.0, atol=1e-12)


def test_gauss_legendre_rejects_empty():
    with pytest.raises(ValueError):
        gauss_legendre(0)


# ---------------------------------------------------------------- harmonics

def test_y00_is_constant():
    th = np.array([0.3, 1.2, 2.9])
    ph = np.array([-2.0, 0.4, 3.0])
    assert_allclose(sph_harm_eval(0, 0, th, ph), 1/np.sqrt(4*np.pi),
                    atol=1e-15)


def test_sph_harm_matches_scipy():
    from scipy.special import sph_harm_y
    rng = np.random.default_rng(1)
    th = rng.uniform(0.01, np.pi - 0.01, 40)
    ph = rng.uniform(-np.pi, np.pi, 40)
    for n, m in [(1, 0), (3, 2), (5, -4), (8, 8), (12, -7)]:
        got = sph_harm_eval(n, m, th, ph)
        ref = sph_harm_y(n, m, th, ph)
        assert_allclose(got, ref, atol=1e-12)


def test_sph_harm_rejects_bad_order():
    with pytest.raises(ValueError):
        sph_harm_eval(2, 3, 0.5, 0.5)


def test_orthonormality():
    N = 6
    th, wth, ph = analysis_grid(N)
    TH, PH = np.meshgrid(th, ph, indexing="ij")
    B = sph_basis_matrix(TH.ravel(), PH.ravel(), N)
    w = np.repeat(wth, ph.size)*(np.pi/N)
    G = (B.conj()*w[:, None]).T @ B
    assert_allclose(G, np.eye(N*N), atol=1e-12)


def test_analysis_of_constant():
    N = 5
    th, _, ph = analysis_grid(N)
    TH, _PH = np.meshgrid(th, ph, indexing="ij")
    coeffs = sph_analysis(np.ones_like(TH), N)
    assert_allclose(coeffs.get(0, 0), np.sqrt(4*np.pi), atol=1e-12)
    rest = coeffs.c.copy()
    rest[SphericalCoeffs.index(0, 0)] = 0.0
    assert np.max(np.abs(rest)) < 1e-12


def test_round_trip_single_harmonic():
    N = 6
    th, _, ph = analysis_grid(N)
    TH, PH = np.meshgrid(th, ph, indexing="ij")
    vals = sph_harm_eval(3, 2, TH, PH)
    coeffs = sph_analysis(vals, N)
    back = sph_synthesis(coeffs, TH, PH)
    assert_allclose(back, vals, atol=1e-10)


def test_round_trip_random_field():
    rng = np.random.default_rng(2)
    N = 8
    c = _random_band_limited(rng, N)
    th, _, ph = analysis_grid(N)
    TH, PH = np.meshgrid(th, ph, indexing="ij")
    vals = sph_synthesis(c, TH, PH)
    assert np.max(np.abs(vals.imag)) < 1e-11  # conjugate symmetry holds
    got = sph_analysis(vals, N)
    assert_allclose(got.c, c.c, atol=1e-10)


def test_coeff_index_layout():
    assert SphericalCoeffs.index(0, 0) == 0
    assert SphericalCoeffs.index(1, -1) == 1
    assert SphericalCoeffs.index(1, 1) == 3
    assert SphericalCoeffs.index(3, 0) == 12
    with pytest.raises(ValueError):
        SphericalCoeffs.index(1, 2)


# ---------------------------------------------------------------- laplacian

def test_laplacian_eigenvalues():
    lap = spherical_laplacian(SphericalCoeffs.single(4, 1, 0))
    assert_allclose(lap.get(1, 0), -2.0, atol=1e-15)
    lap = spherical_laplacian(SphericalCoeffs.single(4, 0, 0, 2.5))
    assert_allclose(lap.get(0, 0), 0.0, atol=1e-15)


def _pole_sampler(coeffs, pole):
    def sampler(s, t):
        th, ph = rotated_angles(s, t, pole[0], pole[1])
        return np.real(sph_synthesis(coeffs, th, ph))
    return sampler


def test_pole_average_constant_is_zero():
    c = SphericalCoeffs.single(3, 0, 0, 4.0)
    got = pole_second_derivative_average(_pole_sampler(c, (0.7, 1.1)))
    assert abs(got) < 1e-9


def test_pole_average_y20_at_north_pole():
    c = SphericalCoeffs.single(4, 2, 0)
    got = pole_second_derivative_average(_pole_sampler(c, (0.0, 0.0)))
    ref = 0.5*(-6.0)*np.real(sph_harm_eval(2, 0, 0.0, 0.0))
    assert abs(got - ref) < 1e-6


def test_pole_average_y11_generic_pole():
    c = SphericalCoeffs.zeros(4)
    c.c[SphericalCoeffs.index(1, 1)] = 1.0
    c.c[SphericalCoeffs.index(1, -1)] = -1.0  # real combination
    pole = (1.3, 0.8)
    got = pole_second_derivative_average(_pole_sampler(c, pole))
    lap = spherical_laplacian(c)
    ref = 0.5*np.real(sph_synthesis(lap, np.array([pole[0]]),
                                    np.array([pole[1]])))[0]
    assert abs(got - ref) < 1e-6


def test_pole_average_matches_laplacian_random_fields():
    rng = np.random.default_rng(3)
    for trial in range(5):
        c = _random_band_limited(rng, 8)
        lap = spherical_laplacian(c)
        pole = (rng.uniform(0.2, np.pi - 0.2), rng.uniform(-np.pi, np.pi))
        got = pole_second_derivative_average(_pole_sampler(c, pole))
        ref = 0.5*np.real(sph_synthesis(lap, np.array([pole[0]]),
                                        np.array([pole[1]])))[0]
        assert abs(got - ref) < 1e-6


def test_pole_average_step_refinement():
    rng = np.random.default_rng(4)
    c = _random_band_limited(rng, 8)
    pole = (1.0, 0.4)
    lap = spherical_laplacian(c)
    ref = 0.5*np.real(sph_synthesis(lap, np.array([pole[0]]),
                                    np.array([pole[1]])))[0]
    sampler = _pole_sampler(c, pole)
    errs = [abs(pole_second_derivative_average(sampler, h=h) - ref)
            for h in (4e-2, 2e-2, 1e-2)]
    assert errs[2] < errs[0]
    assert errs[2] < 1e-6
