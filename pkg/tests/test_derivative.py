"""Finite-difference shape derivatives: quotients, Richardson, diagnostics."""

import numpy as np
import pytest

from shapecalc.derivative import FDConfig, compare, eulerian_fd, fd_quotients
from shapecalc.errors import InvariantViolation, NoConvergence
from shapecalc.fields import sum_field
from shapecalc.flow import FlowConfig
from shapecalc.functionals import ShapeFunctional, analytic_dlength, length

TWO_PI = 2.0 * np.pi


def test_trace_layout(circle1, radial2, fd5):
    tr = fd_quotients(length_functional_plain(), circle1, radial2, cfg=fd5)
    np.testing.assert_allclose(tr.ts, 1e-2 / 2.0 ** np.arange(5), rtol=1e-15)
    assert tr.quotients.shape == (5,)
    assert tr.extrapolants.shape == (5,)
    assert tr.value == tr.extrapolants[-1]
    assert tr.error_estimate > 0.0


def length_functional_plain():
    return ShapeFunctional(name="length", evaluate=length)


def test_fd_matches_growth_rate(circle1, radial2, fd5):
    val, err = eulerian_fd(length_functional_plain(), circle1, radial2, cfg=fd5)
    assert val == pytest.approx(TWO_PI, rel=1e-8)
    assert abs(val - analytic_dlength(circle1, radial2)) <= 10 * err


def test_richardson_beats_raw_quotients(circle1, identity2, fd5):
    # flowing along X(x) = x grows lengths like e^t, so the raw quotients
    # carry a full Taylor tail for the extrapolation to remove
    tr = fd_quotients(length_functional_plain(), circle1, identity2, cfg=fd5)
    exact = analytic_dlength(circle1, identity2)
    assert abs(tr.value - exact) < abs(tr.quotients[-1] - exact)
    assert abs(tr.value - exact) < 1e-3 * abs(tr.quotients[0] - exact)


def test_derivative_scales_linearly(circle1, radial2, fd5):
    doubled = sum_field([radial2, radial2], name="radial*2")
    v1, _ = eulerian_fd(length_functional_plain(), circle1, radial2, cfg=fd5)
    v2, _ = eulerian_fd(length_functional_plain(), circle1, doubled, cfg=fd5)
    assert v2 == pytest.approx(2.0 * v1, rel=1e-6)


def test_compare_verdict_and_fields(circle1, radial2, fd5):
    rep = compare(length_functional(), circle1, radial2, cfg=fd5)
    assert rep.verdict == "pass"
    assert rep.functional == "length"
    assert rep.manifold == "circle1"
    assert rep.field == "radial"
    assert rep.rel_diff <= 1e-6
    assert rep.abs_diff == pytest.approx(
        abs(rep.fd_value - rep.analytic_value), rel=1e-12, abs=1e-300
    )
    assert rep.trace is not None


def length_functional():
    from shapecalc.functionals import length_functional as mk

    return mk()


def test_compare_detects_corrupted_closed_form(circle1, radial2, fd5):
    skewed = ShapeFunctional(
        name="length",
        evaluate=length,
        analytic_derivative=lambda M, X: analytic_dlength(M, X) + 1e-3,
    )
    rep = compare(skewed, circle1, radial2, cfg=fd5)
    assert rep.verdict == "fail"
    assert rep.abs_diff == pytest.approx(1e-3, rel=1e-3)


def test_compare_needs_closed_form(circle1, radial2, fd5):
    bare = ShapeFunctional(name="length", evaluate=length)
    with pytest.raises(InvariantViolation):
        compare(bare, circle1, radial2, cfg=fd5)


def test_square_root_kink_is_flagged(circle1, radial2, fd5):
    # J = sqrt(|L - 2 pi|) has an infinite one-sided derivative at the
    # circle, so the quotient tail must be reported as divergent
    kink = ShapeFunctional(
        name="kink",
        evaluate=lambda M: float(np.sqrt(abs(length(M) - TWO_PI))),
    )
    with pytest.raises(NoConvergence):
        eulerian_fd(kink, circle1, radial2, cfg=fd5)


def test_fd_config_validation():
    with pytest.raises(InvariantViolation):
        FDConfig(t0=-1.0)
    with pytest.raises(InvariantViolation):
        FDConfig(levels=1)


def test_max_step_resolution():
    assert FDConfig().max_step == pytest.approx(0.01)
    cfg = FDConfig(flow_cfg=FlowConfig(t_final=0.005, n_steps=1))
    assert cfg.max_step == pytest.approx(0.005)


def test_error_estimate_has_floor(segment01, e1_field, fd5):
    # translating a segment never changes its length; the estimate must
    # still be positive so downstream ratios stay defined
    val, err = eulerian_fd(length_functional_plain(), segment01, e1_field, cfg=fd5)
    assert val == pytest.approx(0.0, abs=1e-12)
    assert err > 0.0
