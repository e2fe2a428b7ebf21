import numpy as np
import pytest
from numpy.testing import assert_allclose

from closeeval.geometry3d import (Surface3D, custom_radial, direction,
                                  mushroom, rotated_angles, rotated_frame,
                                  rotation_matrix, surface_eval,
                                  surface_point_and_normal, unit_sphere)
from closeeval.spectral import mapped_rule, periodic_nodes

SURFACES = {"sphere": unit_sphere(), "mushroom": mushroom()}


def test_sphere_anchor_points():
    p = surface_eval(unit_sphere(), np.pi/2, 0.0)
    assert_allclose(p.position, [1.0, 0.0, 0.0], atol=1e-15)
    assert_allclose(p.normal, [1.0, 0.0, 0.0], atol=1e-15)
    assert_allclose(p.area_element, 1.0, atol=1e-15)


def test_mushroom_anchor_points():
    # equator: profile(0) = 2 - 1/101, stretched by 2 along the second axis
    P0 = 2.0 - 1.0/101.0
    p = surface_eval(mushroom(), np.pi/2, np.pi/2)
    assert_allclose(p.position, [0.0, 2*P0, 0.0], atol=1e-13)
    # dimple center: profile(1) = 1 exactly
    y, nu = surface_point_and_normal(mushroom(), 0.0, 0.0)
    assert_allclose(y, [0.0, 0.0, 1.0], atol=1e-15)
    assert_allclose(nu, [0.0, 0.0, 1.0], atol=1e-12)
    # opposite pole: profile(-1) = 2 - 1/401
    y, nu = surface_point_and_normal(mushroom(), np.pi, 0.0)
    assert_allclose(y, [0.0, 0.0, -(2.0 - 1.0/401.0)], atol=1e-14)
    assert_allclose(nu, [0.0, 0.0, -1.0], atol=1e-12)


def test_rotation_matrix_basics():
    assert_allclose(rotation_matrix(0.0, 0.0).matrix, np.eye(3), atol=1e-15)
    R = rotation_matrix(np.pi/2, 0.0).matrix
    assert_allclose(R, [[0, 0, 1], [0, 1, 0], [-1, 0, 0]], atol=1e-15)


@pytest.mark.parametrize("theta,phi", [(0.7, -2.1), (2.9, 0.4), (1.5708, 3.1)])
def test_rotation_matrix_proper_orthogonal(theta, phi):
    R = rotation_matrix(theta, phi).matrix
    assert_allclose(R.T @ R, np.eye(3), atol=1e-14)
    assert_allclose(np.linalg.det(R), 1.0, atol=1e-14)
    assert_allclose(R[:, 2], direction(theta, phi), atol=1e-14)


def test_rotated_angles_pole_and_antipode():
    # s = 0 lands on the chosen pole itself
    th, ph = rotated_angles(0.0, 1.234, 0.8, -0.5)
    assert_allclose([th, ph], [0.8, -0.5], atol=1e-14)
    # s = pi/2, t = 0 from the pole (pi/2, 0) reaches the south pole
    th, ph = rotated_angles(np.pi/2, 0.0, np.pi/2, 0.0)
    assert_allclose(th, np.pi, atol=1e-14)


def test_rotated_angles_round_trip():
    rng = np.random.default_rng(7)
    for _ in range(50):
        s, t = rng.uniform(0.05, np.pi - 0.05), rng.uniform(-np.pi, np.pi)
        ts, ps = rng.uniform(0, np.pi), rng.uniform(-np.pi, np.pi)
        th, ph = rotated_angles(s, t, ts, ps)
        R = rotation_matrix(ts, ps).matrix
        assert_allclose(direction(th, ph), R @ direction(s, t), atol=1e-12)
        assert 0 <= th <= np.pi


def test_rotated_angles_broadcasts():
    s = np.linspace(0.1, 3.0, 5)[:, None]
    t = periodic_nodes(8)
    th, ph = rotated_angles(s, t, 0.9, 0.2)
    assert th.shape == (5, 8) and ph.shape == (5, 8)


def _patch_area(surface, n_polar=32, n_azimuth=64):
    rule = mapped_rule(n_polar)
    t = periodic_nodes(n_azimuth)
    p = surface_eval(surface, rule.nodes[:, None], t[None, :],
                     want_normal=False)
    return (2*np.pi/n_azimuth)*np.sum(rule.weights @ p.area_element)


def test_sphere_area():
    assert_allclose(_patch_area(unit_sphere()), 4*np.pi, rtol=1e-12)


def test_stretched_sphere_volume_via_divergence():
    # axes (1, 2, 1) triple the enclosed volume; divergence theorem:
    # 3V = integral of y . nu dA
    surf = custom_radial(lambda c: np.ones_like(np.asarray(c, float)),
                         lambda c: np.zeros_like(np.asarray(c, float)),
                         axes=(1.0, 2.0, 1.0))
    rule = mapped_rule(48)
    t = periodic_nodes(96)
    p = surface_eval(surf, rule.nodes[:, None], t[None, :])
    flux = np.sum(p.position*p.normal, axis=-1)*p.area_element
    vol = (2*np.pi/96)*np.sum(rule.weights @ flux)/3.0
    assert_allclose(vol, 2*(4*np.pi/3), rtol=1e-10)


@pytest.mark.parametrize("name", sorted(SURFACES))
def test_normals_point_outward(name):
    surf = SURFACES[name]
    rule = mapped_rule(6)
    for th in rule.nodes:
        for ph in periodic_nodes(6):
            p = surface_eval(surf, th, ph)
            assert surf.contains(p.position - 1e-4*p.normal)
            assert not surf.contains(p.position + 1e-4*p.normal)


def test_contains_reference_points():
    assert unit_sphere().contains((0.5, 0.0, 0.0))
    assert not unit_sphere().contains((1.5, 0.0, 0.0))
    m = mushroom()
    assert m.contains((0.0, 0.0, 0.0))
    assert m.contains((0.0, 2.5, 0.0))  # stretched axis reaches ~3.98
    assert not m.contains((0.0, 4.1, 0.0))
    # the dimple: radius 1 at the north pole, ~2 at the south pole
    assert m.contains((0.0, 0.0, 0.9))
    assert not m.contains((0.0, 0.0, 1.5))
    assert m.contains((0.0, 0.0, -1.5))
    assert not m.contains((5.0, 4.0, 3.0))  # the exterior source point


def test_surface_eval_pole_raises_only_with_normal():
    with pytest.raises(ValueError):
        surface_eval(unit_sphere(), 0.0, 0.0)
    p = surface_eval(unit_sphere(), 0.0, 0.0, want_normal=False)
    assert_allclose(p.position, [0.0, 0.0, 1.0], atol=1e-15)
    assert_allclose(p.area_element, 0.0, atol=1e-15)
    assert p.normal is None


def test_point_and_normal_is_pole_safe():
    for ts, ps in [(0.0, 0.0), (np.pi, 1.0), (0.3, -2.0)]:
        y, nu = surface_point_and_normal(unit_sphere(), ts, ps)
        assert_allclose(y, direction(ts, ps), atol=1e-14)
        assert_allclose(nu, direction(ts, ps), atol=1e-12)
        assert_allclose(np.linalg.norm(nu), 1.0, atol=1e-13)


def test_rotated_frame_shapes_and_area():
    rule = mapped_rule(24)
    t = periodic_nodes(48)
    y, W, nu, th, ph = rotated_frame(unit_sphere(), 0.9, 0.4,
                                     rule.nodes[:, None], t[None, :])
    assert y.shape == (24, 48, 3) and nu.shape == (24, 48, 3)
    assert W.shape == (24, 48) and th.shape == (24, 48)
    area = (2*np.pi/48)*np.sum(rule.weights @ W)
    assert_allclose(area, 4*np.pi, rtol=1e-12)
    # on the sphere the rotated position is its own normal, and the
    # reported angles re-synthesize it
    assert_allclose(nu, y, atol=1e-13)
    assert_allclose(direction(th, ph), y, atol=1e-12)


def test_rotated_frame_matches_rotated_angles():
    rule = mapped_rule(8)
    t = periodic_nodes(8)
    _, _, _, th, ph = rotated_frame(mushroom(), 1.1, -0.7,
                                    rule.nodes[:, None], t[None, :])
    th2, ph2 = rotated_angles(rule.nodes[:, None], t[None, :], 1.1, -0.7)
    assert_allclose(th, th2, atol=1e-12)
    wrapped = np.mod(ph - ph2 + np.pi, 2*np.pi) - np.pi
    assert_allclose(wrapped, 0.0, atol=1e-12)


def test_custom_radial_validation():
    one = lambda c: np.ones_like(np.asarray(c, float))
    zero = lambda c: np.zeros_like(np.asarray(c, float))
    with pytest.raises(ValueError):
        custom_radial(one, zero, axes=(1.0, -1.0, 1.0))
