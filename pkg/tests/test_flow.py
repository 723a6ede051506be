"""Flow integration: RK4 accuracy, jacobians, manifold transport, invariance."""

from types import SimpleNamespace

import numpy as np
import pytest

from shapecalc.errors import InvariantViolation, NonFinite
from shapecalc.fields import bump_field
from shapecalc.flow import (
    FlowConfig,
    flow_manifold,
    flow_point,
    flow_with_jacobian,
    invariance_residual,
)
from shapecalc.functionals import length

TWO_PI = 2.0 * np.pi


def test_rotation_quarter_turn(rotation2):
    cfg = FlowConfig(t_final=np.pi / 2, n_steps=1000)
    end = flow_point(rotation2, np.array([1.0, 0.0]), cfg)
    np.testing.assert_allclose(end, [0.0, 1.0], atol=1e-10)


def test_rk4_error_scales_fourth_order(rotation2):
    exact = np.array([0.0, 1.0])
    errs = []
    for n in (50, 100):
        got = flow_point(rotation2, np.array([1.0, 0.0]), FlowConfig(np.pi / 2, n))
        errs.append(np.linalg.norm(got - exact))
    ratio = errs[0] / errs[1]
    assert 14.0 <= ratio <= 18.0


def test_flow_group_property(radial2):
    x0 = np.array([1.0, 0.5])
    both = flow_point(radial2, x0, FlowConfig(0.3, 300))
    half = flow_point(radial2, x0, FlowConfig(0.15, 150))
    again = flow_point(radial2, half, FlowConfig(0.15, 150))
    np.testing.assert_allclose(again, both, atol=1e-10)


def test_flow_jacobian_rotation(rotation2):
    x, J = flow_with_jacobian(rotation2, np.array([1.0, 0.0]), FlowConfig(np.pi / 2, 400))
    np.testing.assert_allclose(x[0], [0.0, 1.0], atol=1e-10)
    np.testing.assert_allclose(J[0], [[0.0, -1.0], [1.0, 0.0]], atol=1e-9)


def test_flow_jacobian_matches_fd():
    b = bump_field(np.array([0.0, 0.0]), 1.0, np.array([0.4, -0.3]))
    x0 = np.array([0.2, 0.1])
    cfg = FlowConfig(0.2, 200)
    _, J = flow_with_jacobian(b, x0, cfg)
    h = 1e-6
    fd = np.empty((2, 2))
    for j in range(2):
        e = np.zeros(2)
        e[j] = h
        fd[:, j] = (flow_point(b, x0 + e, cfg) - flow_point(b, x0 - e, cfg)) / (2 * h)
    np.testing.assert_allclose(J[0], fd, atol=1e-8)


def test_default_step_count_matches_explicit(rotation2):
    # t_final = 0.05 resolves to five steps of the default maximum size
    auto = flow_point(rotation2, np.array([1.0, 0.0]), FlowConfig(0.05))
    manual = flow_point(rotation2, np.array([1.0, 0.0]), FlowConfig(0.05, n_steps=5))
    np.testing.assert_array_equal(auto, manual)


def test_unknown_method_rejected():
    with pytest.raises(InvariantViolation):
        FlowConfig(0.1, method="euler")


def test_flow_manifold_scales_circle(circle1, identity2):
    # d/dt x = x has the exact solution x e^t, so lengths scale by e^t
    t = 0.3
    moved = flow_manifold(identity2, circle1, FlowConfig(t, 100))
    assert moved.transported
    assert length(moved) == pytest.approx(TWO_PI * np.exp(t), rel=1e-7)


def test_flow_manifold_preserves_surface_area_when_tangent(cylinder, e3_field):
    from shapecalc.functionals import surface_area

    moved = flow_manifold(e3_field, cylinder, FlowConfig(0.4, 40))
    assert surface_area(moved) == pytest.approx(surface_area(cylinder), rel=1e-10)


def test_blowup_is_reported():
    # a compactly supported field is bounded and cannot blow up, so the
    # overflow guard is exercised with a bare duck-typed stand-in
    def X(p):
        out = np.zeros_like(p)
        out[:, 0] = p[:, 0] ** 2
        return out

    field = SimpleNamespace(X=X, name="quad")
    with np.errstate(over="ignore", invalid="ignore"):
        with pytest.raises(NonFinite):
            flow_point(field, np.array([1.0, 0.0]), FlowConfig(2.0, 60))


def test_invariance_residual_tangent_rotation(circle1, rotation2):
    assert invariance_residual(rotation2, circle1, 0.5) <= 1e-9


def test_invariance_residual_detects_motion(circle1, identity2):
    # radial growth moves every circle point a distance e^t - 1
    res = invariance_residual(identity2, circle1, 0.1)
    assert res == pytest.approx(np.exp(0.1) - 1.0, rel=1e-6)


def test_invariance_residual_accepts_config(cylinder):
    from shapecalc.catalog import build_field

    rot3 = build_field(
        {
            "kind": "linear",
            "matrix": [[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]],
            "name": "rot3",
        },
        3,
    )
    res = invariance_residual(rot3, cylinder, FlowConfig(0.5, 500))
    assert res <= 1e-9
