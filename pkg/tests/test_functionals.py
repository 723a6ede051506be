"""Shape functionals and their closed-form first variations."""

import numpy as np
import pytest

from shapecalc.errors import CrackNotInterior, NotArcLength
from shapecalc.fields import Ball
from shapecalc.functionals import (
    analytic_darea,
    analytic_delastic,
    analytic_dlength,
    area_functional,
    bending_energy,
    crack_functional,
    elastic_energy,
    elastic_functional,
    length,
    length_functional,
    surface_area,
)

TWO_PI = 2.0 * np.pi
# perimeter of the 2:1 ellipse, 8 E(3/4) in complete elliptic integrals
ELLIPSE_21_PERIMETER = 9.688448220547675


def test_exact_lengths(circle1, circle2, segment01, helix1, ellipse21):
    assert length(circle1) == pytest.approx(TWO_PI, rel=1e-12)
    assert length(circle2) == pytest.approx(2 * TWO_PI, rel=1e-12)
    assert length(segment01) == pytest.approx(1.0, rel=1e-12)
    assert length(helix1) == pytest.approx(TWO_PI * np.sqrt(2.0), rel=1e-12)
    assert length(ellipse21) == pytest.approx(ELLIPSE_21_PERIMETER, rel=1e-10)


def test_quadrature_panels_converged(ellipse21):
    assert length(ellipse21, panels=512) == pytest.approx(
        length(ellipse21, panels=2048), rel=1e-12
    )


def test_elastic_energy_circle(circle1, circle2):
    # integral of kappa^2 over the curve: 2*pi/r
    assert elastic_energy(circle1) == pytest.approx(TWO_PI, rel=1e-12)
    assert elastic_energy(circle2) == pytest.approx(np.pi, rel=1e-12)
    assert bending_energy(circle2) == pytest.approx(elastic_energy(circle2), rel=1e-13)


def test_elastic_energy_straight_is_zero(segment01):
    assert elastic_energy(segment01) == pytest.approx(0.0, abs=1e-15)


def test_surface_area_cylinder(cylinder):
    assert surface_area(cylinder) == pytest.approx(4 * np.pi, rel=1e-10)


def test_functional_wrappers_evaluate(circle1, cylinder):
    assert length_functional().evaluate(circle1) == pytest.approx(TWO_PI, rel=1e-12)
    assert elastic_functional().evaluate(circle1) == pytest.approx(TWO_PI, rel=1e-12)
    assert area_functional().evaluate(cylinder) == pytest.approx(4 * np.pi, rel=1e-10)


def test_dlength_circle_radial(circle1, radial2):
    # growing the radius at unit rate adds 2*pi of length per unit time
    got = analytic_dlength(circle1, radial2)
    assert got == pytest.approx(TWO_PI, rel=1e-6)


def test_dlength_forms_agree(ellipse21, rotation2, shear2):
    for X in (rotation2, shear2):
        hadamard = analytic_dlength(ellipse21, X, form="hadamard")
        jacobian = analytic_dlength(ellipse21, X, form="jacobian")
        assert hadamard == pytest.approx(jacobian, rel=1e-8, abs=1e-10)


def test_dlength_segment_translation_and_stretch(segment01, e1_field, identity2):
    assert analytic_dlength(segment01, e1_field) == pytest.approx(0.0, abs=1e-12)
    # X(x) = x stretches every length at unit rate
    assert analytic_dlength(segment01, identity2) == pytest.approx(1.0, rel=1e-10)


def test_dlength_rigid_motions_are_null(circle1, circle2, rotation2, e1_field):
    for M in (circle1, circle2):
        assert analytic_dlength(M, rotation2) == pytest.approx(0.0, abs=1e-10)
        assert analytic_dlength(M, e1_field) == pytest.approx(0.0, abs=1e-10)


def test_delastic_circle(circle2, radial2, rotation2):
    # E(r) = 2*pi/r, so dE under unit radial growth is -2*pi/r^2
    got = analytic_delastic(circle2, radial2)
    assert got == pytest.approx(-np.pi / 2, rel=1e-6)
    assert analytic_delastic(circle2, rotation2) == pytest.approx(0.0, abs=1e-10)


def test_darea_cylinder(cylinder, radial3, e3_field, stretch_z):
    assert analytic_darea(cylinder, radial3) == pytest.approx(4 * np.pi, rel=1e-8)
    assert analytic_darea(cylinder, e3_field) == pytest.approx(0.0, abs=1e-10)
    assert analytic_darea(cylinder, stretch_z) == pytest.approx(4 * np.pi, rel=1e-8)


def test_crack_functional_basics(crack_segment):
    region = Ball(np.zeros(2), 3.0)
    J = crack_functional(region, crack_segment)
    assert J.name == "crack[length@crack_straight]"
    assert J.margin == pytest.approx(2.0)
    assert J.evaluate(crack_segment) == pytest.approx(2.0, rel=1e-12)


def test_crack_functional_custom_inner(crack_arc):
    region = Ball(np.zeros(2), 4.0)
    J = crack_functional(region, crack_arc, inner=elastic_functional())
    # arc of radius 2 spanning the angle window: kappa^2 * length
    span = (TWO_PI - 0.5) - (np.pi + 0.5)
    assert J.evaluate(crack_arc) == pytest.approx(0.25 * 2.0 * span, rel=1e-10)


def test_crack_must_sit_inside_region(crack_segment):
    with pytest.raises(CrackNotInterior):
        crack_functional(Ball(np.zeros(2), 0.9), crack_segment)
    # touching the rim is not strictly interior either
    with pytest.raises(CrackNotInterior):
        crack_functional(Ball(np.zeros(2), 1.0), crack_segment)


def test_arc_length_guard():
    from shapecalc.geometry import ParamCurve

    fast = ParamCurve(
        dim=2,
        a=0.0,
        b=1.0,
        gamma=lambda t: np.stack([2 * t, np.zeros_like(t)], axis=-1),
        dgamma=lambda t: np.stack([2 * np.ones_like(t), np.zeros_like(t)], axis=-1),
        ddgamma=lambda t: np.zeros((len(np.atleast_1d(t)), 2)),
        closed=False,
        name="fast",
    )
    # bending_energy accepts any regular chart, elastic_energy does not
    assert bending_energy(fast) == pytest.approx(0.0, abs=1e-15)
    with pytest.raises(NotArcLength):
        elastic_energy(fast)
