"""Shared fixtures for the test suite.

Shapes and fields are built through the JSON catalog so the tests exercise
the same constructors the CLI uses.  Everything is session scoped: the
geometry objects are immutable and their construction-time self checks are
not free.
"""

import numpy as np
import pytest

from shapecalc.catalog import build_field, build_shape
from shapecalc.derivative import FDConfig

TWO_PI = 2.0 * np.pi


@pytest.fixture(scope="session")
def circle1():
    return build_shape({"kind": "circle", "radius": 1.0, "name": "circle1"})


@pytest.fixture(scope="session")
def circle2():
    return build_shape({"kind": "circle", "radius": 2.0, "name": "circle2"})


@pytest.fixture(scope="session")
def ellipse21():
    return build_shape({"kind": "ellipse", "a": 2.0, "b": 1.0, "name": "ellipse21"})


@pytest.fixture(scope="session")
def segment01():
    # unit-length straight segment kept away from the origin, where the
    # smoothed radial catalog field varies on a tiny scale
    return build_shape(
        {"kind": "segment", "p0": [0.5, 0.0], "p1": [1.5, 0.0], "name": "segment01"}
    )


@pytest.fixture(scope="session")
def crack_segment():
    return build_shape(
        {"kind": "segment", "p0": [-1.0, 0.0], "p1": [1.0, 0.0], "name": "crack_straight"}
    )


@pytest.fixture(scope="session")
def crack_arc():
    return build_shape(
        {
            "kind": "arc",
            "radius": 2.0,
            "angle0": np.pi + 0.5,
            "angle1": TWO_PI - 0.5,
            "name": "crack_arc",
        }
    )


@pytest.fixture(scope="session")
def helix1():
    return build_shape(
        {"kind": "helix", "radius": 1.0, "pitch": TWO_PI, "turns": 1.0, "name": "helix1"}
    )


@pytest.fixture(scope="session")
def cylinder():
    return build_shape(
        {"kind": "cylinder", "radius": 1.0, "height": 2.0, "name": "cylinder"}
    )


@pytest.fixture(scope="session")
def radial2():
    return build_field({"kind": "radial", "name": "radial"}, 2)


@pytest.fixture(scope="session")
def rotation2():
    return build_field({"kind": "rotation", "name": "rotation"}, 2)


@pytest.fixture(scope="session")
def e1_field():
    return build_field({"kind": "constant", "vector": [1.0, 0.0], "name": "e1"}, 2)


@pytest.fixture(scope="session")
def identity2():
    return build_field(
        {"kind": "linear", "matrix": [[1.0, 0.0], [0.0, 1.0]], "name": "identity"}, 2
    )


@pytest.fixture(scope="session")
def shear2():
    return build_field(
        {"kind": "linear", "matrix": [[0.0, 1.0], [0.0, 0.0]], "name": "shear"}, 2
    )


@pytest.fixture(scope="session")
def radial3():
    return build_field({"kind": "radial", "name": "radial"}, 3)


@pytest.fixture(scope="session")
def e3_field():
    return build_field(
        {"kind": "constant", "vector": [0.0, 0.0, 1.0], "name": "e3"}, 3
    )


@pytest.fixture(scope="session")
def stretch_z():
    return build_field(
        {
            "kind": "linear",
            "matrix": [[0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 1.0]],
            "name": "stretch_z",
        },
        3,
    )


@pytest.fixture(scope="session")
def fd5():
    # five halving levels keep the Richardson tail long enough to settle the
    # noisier probe-field derivatives
    return FDConfig(t0=1e-2, levels=5)
