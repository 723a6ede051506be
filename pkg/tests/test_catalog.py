"""JSON catalog: building shapes, fields, functionals, and diagnostics."""

import numpy as np
import pytest

from shapecalc.catalog import (
    FIELD_KINDS,
    FUNCTIONAL_KINDS,
    SHAPE_KINDS,
    build_field,
    build_shape,
    compatible,
    parse_field,
    parse_functional,
)
from shapecalc.errors import ConfigError
from shapecalc.functionals import (
    area_functional,
    elastic_functional,
    length_functional,
)
from shapecalc.geometry import ParamCurve, ParamSurface


def test_kind_registries():
    assert set(SHAPE_KINDS) == {"arc", "circle", "cylinder", "ellipse", "helix", "segment"}
    assert set(FIELD_KINDS) == {"bump", "constant", "linear", "radial", "rotation", "sum"}
    assert set(FUNCTIONAL_KINDS) == {"area", "crack", "elastic", "length"}


def test_every_shape_kind_builds():
    descs = [
        {"kind": "circle", "radius": 1.5},
        {"kind": "ellipse", "a": 2.0, "b": 1.0},
        {"kind": "segment", "p0": [0.0, 1.0], "p1": [1.0, 1.0]},
        {"kind": "arc", "radius": 1.0, "angle0": 0.2, "angle1": 1.7},
        {"kind": "helix", "radius": 1.0, "pitch": 3.0, "turns": 2.0},
        {"kind": "cylinder", "radius": 0.5, "height": 1.0},
    ]
    built = [build_shape(d) for d in descs]
    assert all(isinstance(m, ParamCurve) for m in built[:5])
    assert isinstance(built[5], ParamSurface)
    assert built[0].closed and not built[2].closed
    assert built[4].dim == 3


def test_unknown_shape_kind():
    with pytest.raises(ConfigError, match="unknown kind 'torus'"):
        build_shape({"kind": "torus", "radius": 1.0})


def test_shape_parameter_diagnostics():
    with pytest.raises(ConfigError, match="pitch"):
        build_shape({"kind": "helix"})
    with pytest.raises(ConfigError, match="radius"):
        build_shape({"kind": "circle", "radius": -1.0})
    with pytest.raises(ConfigError, match="coincide"):
        build_shape({"kind": "segment", "p0": [1.0, 0.0], "p1": [1.0, 0.0]})
    with pytest.raises(ConfigError):
        build_shape({"kind": "arc", "radius": 1.0, "angle0": 2.0, "angle1": 2.0})
    with pytest.raises(ConfigError):
        build_shape({"kind": "ellipse", "a": 0.0, "b": 1.0})


def test_field_dims():
    assert parse_field({"kind": "radial"}).dims == frozenset({2, 3})
    assert parse_field({"kind": "rotation"}).dims == frozenset({2})
    assert parse_field({"kind": "constant", "vector": [1.0, 0.0]}).dims == frozenset({2})
    assert parse_field(
        {"kind": "constant", "vector": [0.0, 0.0, 1.0]}
    ).dims == frozenset({3})


def test_field_dim_mismatch():
    with pytest.raises(ConfigError, match="dimension"):
        build_field({"kind": "constant", "vector": [1.0, 0.0]}, 3)
    with pytest.raises(ConfigError, match="dimension"):
        build_field({"kind": "rotation"}, 3)


def test_unknown_field_kind():
    with pytest.raises(ConfigError, match="unknown kind"):
        parse_field({"kind": "vortex"})


def test_linear_field_matrix_validation():
    with pytest.raises(ConfigError):
        build_field({"kind": "linear", "matrix": [[1.0, 0.0]]}, 2)
    f = build_field({"kind": "linear", "matrix": [[0.0, 1.0], [0.0, 0.0]]}, 2)
    pts = np.array([[1.0, 2.0], [0.5, -1.0]])
    np.testing.assert_allclose(f.X(pts), [[2.0, 0.0], [-1.0, 0.0]], rtol=1e-12)


def test_bump_field_from_config():
    f = build_field(
        {"kind": "bump", "center": [0.5, 0.0], "radius": 0.25, "dir": [0.0, 1.0]},
        2,
    )
    assert f.scale == pytest.approx(0.25)
    np.testing.assert_allclose(f.X(np.array([[0.5, 0.0]]))[0], [0.0, 1.0], rtol=1e-14)


def test_sum_field_from_config():
    f = build_field(
        {
            "kind": "sum",
            "terms": [
                {"kind": "constant", "vector": [1.0, 0.0]},
                {"kind": "bump", "center": [0.0, 0.0], "radius": 0.5, "dir": [0.0, 2.0]},
            ],
        },
        2,
    )
    assert f.scale == pytest.approx(0.5)
    np.testing.assert_allclose(f.X(np.array([[0.0, 0.0]]))[0], [1.0, 2.0], rtol=1e-12)


def test_functional_parsing_and_naming(crack_segment):
    shapes = {"crack_straight": crack_segment}
    for kind in ("length", "elastic", "area"):
        parsed = parse_functional({"kind": kind}, shapes)
        assert parsed.crack is None
        assert parsed.functional.name == kind
    parsed = parse_functional(
        {
            "kind": "crack",
            "inner": "length",
            "crack": "crack_straight",
            "region_center": [0.0, 0.0],
            "region_radius": 3.0,
        },
        shapes,
    )
    assert parsed.crack is crack_segment
    assert parsed.functional.name == "crack[length@crack_straight]"


def test_crack_functional_config_errors(crack_segment, cylinder):
    shapes = {"crack_straight": crack_segment, "cyl": cylinder}
    base = {
        "kind": "crack",
        "inner": "length",
        "region_center": [0.0, 0.0],
        "region_radius": 3.0,
    }
    with pytest.raises(ConfigError):
        parse_functional({**base, "crack": "missing"}, shapes)
    with pytest.raises(ConfigError):
        parse_functional({**base, "crack": "cyl"}, shapes)
    with pytest.raises(ConfigError):
        parse_functional({**base, "crack": "crack_straight", "inner": "bogus"}, shapes)
    with pytest.raises(ConfigError):
        parse_functional({"kind": "spectral"}, shapes)


def test_compatibility_matrix(circle1, helix1, segment01, cylinder):
    L, E, A = length_functional(), elastic_functional(), area_functional()
    assert compatible(L, circle1) and compatible(L, helix1) and compatible(L, segment01)
    assert not compatible(L, cylinder)
    assert compatible(E, circle1) and compatible(E, segment01)
    # the bending first-variation needs a planar curve
    assert not compatible(E, helix1)
    assert compatible(A, cylinder)
    assert not compatible(A, circle1)


def test_shape_names_default_and_custom():
    named = build_shape({"kind": "circle", "radius": 1.0, "name": "ring"})
    assert named.name == "ring"
    anon = build_shape({"kind": "circle", "radius": 1.0})
    assert anon.name
