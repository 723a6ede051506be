"""Curves, surfaces, frames, curvature, and nearest-point queries."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shapecalc.errors import DegenerateFrame, DegenerateImmersion, NoBoundary
from shapecalc.geometry import (
    ParamCurve,
    boundary_outward_normal,
    curvature,
    curve_curvature_derivs,
    curve_frame,
    distance_to_manifold,
    integrate_curve,
    integrate_surface,
    nearest_curve_param,
    nearest_surface_param,
    surface_mean_curvature,
    surface_normal,
)

TWO_PI = 2.0 * np.pi


def catenary(half_width=1.0):
    # y = cosh x, not arc-length parameterized, strictly curved
    return ParamCurve(
        dim=2,
        a=-half_width,
        b=half_width,
        gamma=lambda t: np.stack([t, np.cosh(t)], axis=-1),
        dgamma=lambda t: np.stack([np.ones_like(t), np.sinh(t)], axis=-1),
        ddgamma=lambda t: np.stack([np.zeros_like(t), np.cosh(t)], axis=-1),
        closed=False,
        name="catenary",
    )


def test_circle_circumference_quadrature(circle1, circle2):
    one = lambda t: np.ones_like(t)
    assert integrate_curve(circle1, one) == pytest.approx(TWO_PI, rel=1e-12)
    assert integrate_curve(circle2, one) == pytest.approx(2 * TWO_PI, rel=1e-12)


def test_circle_curvature_is_inverse_radius(circle1, circle2):
    ts = np.linspace(0.0, TWO_PI, 17)
    np.testing.assert_allclose(curvature(circle1, ts), 1.0, rtol=1e-12)
    np.testing.assert_allclose(curvature(circle2, ts), 0.5, rtol=1e-12)


def test_ellipse_curvature_extremes(ellipse21):
    # a=2, b=1: kappa = a/b^2 at the flat ends of the minor axis sweep,
    # b/a^2 at the top
    k = curvature(ellipse21, np.array([0.0, np.pi / 2, np.pi]))
    np.testing.assert_allclose(k, [2.0, 0.25, 2.0], atol=1e-12)


def test_straight_segment_curvature_vanishes(segment01):
    ts = np.linspace(segment01.a, segment01.b, 9)
    np.testing.assert_allclose(curvature(segment01, ts), 0.0, atol=1e-14)


def test_helix_curvature_constant(helix1):
    # radius 1, pitch 2*pi: kappa = r/(r^2 + c^2) = 1/2 with c = pitch/(2*pi)
    ts = np.linspace(helix1.a, helix1.b, 9)
    np.testing.assert_allclose(curvature(helix1, ts), 0.5, rtol=1e-10)


def test_helix_arc_length_curvature_derivs(helix1):
    ts = np.array([0.3, 1.0, 4.0])
    k, dk, ddk = curve_curvature_derivs(helix1, ts)
    np.testing.assert_allclose(k, 0.5, rtol=1e-10)
    np.testing.assert_allclose(dk, 0.0, atol=1e-8)
    np.testing.assert_allclose(ddk, 0.0, atol=1e-6)


def test_catenary_curvature_derivs_match_closed_forms():
    cat = catenary()
    ts = np.array([-0.7, -0.2, 0.0, 0.4, 0.8])
    k, dk, ddk = curve_curvature_derivs(cat, ts)
    sech = 1.0 / np.cosh(ts)
    tanh = np.tanh(ts)
    np.testing.assert_allclose(k, sech**2, rtol=1e-10)
    np.testing.assert_allclose(dk, -2.0 * sech**3 * tanh, rtol=1e-6, atol=1e-9)
    np.testing.assert_allclose(
        ddk, 2.0 * sech**4 * (3.0 * tanh**2 - sech**2), rtol=1e-5, atol=1e-7
    )


def test_circle_frame_convention(circle1):
    fr = curve_frame(circle1, np.array([0.0, 1.3]))
    np.testing.assert_allclose(fr.T[0], [0.0, 1.0], atol=1e-14)
    # planar normal is the tangent rotated a quarter turn, inward here
    np.testing.assert_allclose(fr.N[0], [-1.0, 0.0], atol=1e-14)
    np.testing.assert_allclose(fr.speed, 1.0, rtol=1e-14)
    np.testing.assert_allclose(fr.kappa, 1.0, rtol=1e-12)
    assert fr.B is None


def test_helix_frame_orthonormal(helix1):
    ts = np.linspace(helix1.a + 0.1, helix1.b - 0.1, 7)
    fr = curve_frame(helix1, ts)
    for vec in (fr.T, fr.N, fr.B):
        np.testing.assert_allclose(np.linalg.norm(vec, axis=1), 1.0, rtol=1e-12)
    np.testing.assert_allclose(np.sum(fr.T * fr.N, axis=1), 0.0, atol=1e-12)
    np.testing.assert_allclose(np.sum(fr.T * fr.B, axis=1), 0.0, atol=1e-12)
    np.testing.assert_allclose(
        np.cross(fr.T, fr.N), fr.B, atol=1e-12
    )
    np.testing.assert_allclose(fr.speed, np.sqrt(2.0), rtol=1e-12)


def test_planar_straight_frame_from_rotated_tangent(segment01):
    # in the plane the normal comes from rotating the tangent, so straight
    # pieces still carry a frame with zero curvature
    fr = curve_frame(segment01, np.array([0.5]))
    np.testing.assert_allclose(fr.T[0], [1.0, 0.0], atol=1e-14)
    np.testing.assert_allclose(fr.N[0], [0.0, 1.0], atol=1e-14)
    assert fr.kappa[0] == pytest.approx(0.0, abs=1e-14)


def test_straight_space_curve_frame_is_degenerate():
    seg3 = ParamCurve(
        dim=3,
        a=0.0,
        b=1.0,
        gamma=lambda t: np.stack([t, t, np.zeros_like(t)], axis=-1),
        dgamma=lambda t: np.stack(
            [np.ones_like(t), np.ones_like(t), np.zeros_like(t)], axis=-1
        ),
        ddgamma=lambda t: np.zeros((len(np.atleast_1d(t)), 3)),
        closed=False,
        name="diag3",
    )
    with pytest.raises(DegenerateFrame):
        curve_frame(seg3, np.array([0.5]))


def test_zero_speed_curve_rejected():
    # speed 2t vanishes at the left endpoint
    with pytest.raises(DegenerateImmersion):
        ParamCurve(
            dim=2,
            a=0.0,
            b=1.0,
            gamma=lambda t: np.stack([t**2, np.zeros_like(t)], axis=-1),
            dgamma=lambda t: np.stack([2 * t, np.zeros_like(t)], axis=-1),
            ddgamma=lambda t: np.stack([2 * np.ones_like(t), np.zeros_like(t)], axis=-1),
            closed=False,
            name="cusp",
        )


def test_self_intersecting_curve_rejected():
    # figure-eight crosses itself at the origin
    with pytest.raises(DegenerateImmersion):
        ParamCurve(
            dim=2,
            a=0.0,
            b=TWO_PI,
            gamma=lambda t: np.stack([np.sin(t), np.sin(t) * np.cos(t)], axis=-1),
            dgamma=lambda t: np.stack([np.cos(t), np.cos(2 * t)], axis=-1),
            ddgamma=lambda t: np.stack([-np.sin(t), -2 * np.sin(2 * t)], axis=-1),
            closed=True,
            name="eight",
        )


def test_nearest_point_on_circle(circle1):
    pts = np.array([[2.0, 0.0], [0.0, 3.0], [-0.5, 0.0]])
    ts = nearest_curve_param(circle1, pts)
    feet = circle1.gamma(ts)
    np.testing.assert_allclose(feet[0], [1.0, 0.0], atol=1e-12)
    np.testing.assert_allclose(feet[1], [0.0, 1.0], atol=1e-12)
    np.testing.assert_allclose(feet[2], [-1.0, 0.0], atol=1e-12)
    d = distance_to_manifold(circle1, pts)
    np.testing.assert_allclose(d, [1.0, 2.0, 0.5], rtol=1e-12)


def test_nearest_point_matches_distance(ellipse21):
    rng = np.random.default_rng(3)
    pts = rng.uniform(-1.5, 1.5, size=(12, 2)) + np.array([0.0, 1.2])
    ts = nearest_curve_param(ellipse21, pts)
    feet = ellipse21.gamma(ts)
    d = distance_to_manifold(ellipse21, pts)
    np.testing.assert_allclose(np.linalg.norm(pts - feet, axis=1), d, rtol=1e-9)
    # foot must beat a dense sampling of the curve
    dense = ellipse21.gamma(np.linspace(ellipse21.a, ellipse21.b, 4000))
    brute = np.min(
        np.linalg.norm(pts[:, None, :] - dense[None, :, :], axis=2), axis=1
    )
    assert np.all(d <= brute + 1e-9)


def test_nearest_point_on_cylinder(cylinder):
    pts = np.array([[2.0, 0.0, 1.0], [0.0, 0.5, 0.5]])
    us, vs = nearest_surface_param(cylinder, pts)
    feet = cylinder.phi(us, vs)
    d = distance_to_manifold(cylinder, pts)
    np.testing.assert_allclose(np.linalg.norm(pts - feet, axis=1), d, rtol=1e-9)
    np.testing.assert_allclose(feet[0], [1.0, 0.0, 1.0], atol=1e-9)
    np.testing.assert_allclose(d, [1.0, 0.5], rtol=1e-9)


def test_reversed_curve_same_points_same_bend(ellipse21):
    rev = ellipse21.reversed()
    ts = np.linspace(ellipse21.a, ellipse21.b, 9)
    np.testing.assert_allclose(
        rev.gamma(ellipse21.a + ellipse21.b - ts), ellipse21.gamma(ts), atol=1e-12
    )
    one = lambda t: np.ones_like(t)
    assert integrate_curve(rev, one) == pytest.approx(
        integrate_curve(ellipse21, one), rel=1e-12
    )
    # signed planar curvature flips with orientation
    np.testing.assert_allclose(
        curvature(rev, ellipse21.a + ellipse21.b - ts), -curvature(ellipse21, ts),
        rtol=1e-10,
    )


def test_boundary_outward_normals(segment01, circle1, cylinder):
    np.testing.assert_allclose(
        boundary_outward_normal(segment01, "a"), [-1.0, 0.0], atol=1e-14
    )
    np.testing.assert_allclose(
        boundary_outward_normal(segment01, "b"), [1.0, 0.0], atol=1e-14
    )
    with pytest.raises(NoBoundary):
        boundary_outward_normal(circle1, "a")
    # cylinder u runs along the axis, so the "a" rim points down
    np.testing.assert_allclose(
        boundary_outward_normal(cylinder, "a", v=0.3), [0.0, 0.0, -1.0], atol=1e-12
    )
    with pytest.raises(ValueError):
        boundary_outward_normal(cylinder, "a")


def test_cylinder_surface_quantities(cylinder):
    us = np.array([0.5, 1.5])
    vs = np.array([0.0, np.pi / 2])
    n = surface_normal(cylinder, us, vs)
    np.testing.assert_allclose(np.linalg.norm(n, axis=1), 1.0, rtol=1e-12)
    # this parameterization orients the normal toward the axis
    np.testing.assert_allclose(n[0], [-1.0, 0.0, 0.0], atol=1e-12)
    np.testing.assert_allclose(n[1], [0.0, -1.0, 0.0], atol=1e-12)
    h = surface_mean_curvature(cylinder, us, vs)
    np.testing.assert_allclose(h, -1.0, rtol=1e-6)
    one = lambda u, v: np.ones_like(u)
    assert integrate_surface(cylinder, one) == pytest.approx(4 * np.pi, rel=1e-10)


@settings(max_examples=25, deadline=None)
@given(t=st.floats(min_value=0.0, max_value=TWO_PI))
def test_ellipse_frame_orthonormal_property(t):
    ell = _ellipse_cached()
    fr = curve_frame(ell, np.array([t]))
    assert np.linalg.norm(fr.T[0]) == pytest.approx(1.0, rel=1e-12)
    assert np.linalg.norm(fr.N[0]) == pytest.approx(1.0, rel=1e-12)
    assert abs(float(fr.T[0] @ fr.N[0])) < 1e-12
    # acceleration decomposes over the frame
    d2 = ell.ddgamma(np.array([t]))[0]
    tangential = float(d2 @ fr.T[0]) * fr.T[0]
    np.testing.assert_allclose(
        d2 - tangential, fr.kappa[0] * fr.speed[0] ** 2 * fr.N[0], atol=1e-9
    )


_ELL = {}


def _ellipse_cached():
    if "e" not in _ELL:
        from shapecalc.catalog import build_shape

        _ELL["e"] = build_shape({"kind": "ellipse", "a": 2.0, "b": 1.0, "name": "e"})
    return _ELL["e"]
