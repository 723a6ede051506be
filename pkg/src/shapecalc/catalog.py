"""Named builders for shapes, fields, and functionals.

Experiment configs address everything here by a `kind` string plus keyword
parameters.  Builders validate eagerly and raise ConfigError naming the
offending entry, so a bad config dies with a useful message before any
numerics run.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from .errors import ConfigError, ShapecalcError
from .fields import (AmbientField, Ball, bump_field, smooth_step,
                     smooth_step_deriv, sum_field)
from .functionals import (ARC_LENGTH_TOL, CrackFunctional, ShapeFunctional,
                          area_functional, crack_functional,
                          elastic_functional, length_functional)
from .geometry import ParamCurve, ParamSurface

__all__ = [
    "SHAPE_KINDS", "FIELD_KINDS", "FUNCTIONAL_KINDS",
    "ParsedField", "ParsedFunctional",
    "build_shape", "parse_field", "build_field", "parse_functional",
    "compatible",
]

# Fields whose nominal forms do not decay (constant, linear, rotation, ...)
# are multiplied by a radial cutoff: identity on |p| <= CUTOFF_INNER, zero
# from CUTOFF_OUTER out.  Catalog shapes live well inside the inner radius,
# so on and near them the cutoff is exactly 1 and closed-form first
# variations are unaffected.
CUTOFF_INNER = 6.0
CUTOFF_OUTER = 10.0

# smoothing length for the unit radial field at its axis singularity
RADIAL_EPS = 1e-4

_MISSING = object()


class _Params:
    """Keyword-parameter reader that reports errors against a config path."""

    def __init__(self, raw: dict, where: str):
        if not isinstance(raw, dict):
            raise ConfigError(
                f"{where}: parameters must be a JSON object, got "
                f"{type(raw).__name__}"
            )
        self.raw = dict(raw)
        self.where = where

    def scalar(self, key: str, default=_MISSING, positive: bool = False) -> float:
        val = self.raw.pop(key, default)
        if val is _MISSING:
            raise ConfigError(f"{self.where}: missing required parameter '{key}'")
        if val is None and default is None:
            return None
        if isinstance(val, bool) or not isinstance(val, (int, float)):
            raise ConfigError(f"{self.where}: parameter '{key}' must be a number")
        val = float(val)
        if not np.isfinite(val):
            raise ConfigError(f"{self.where}: parameter '{key}' must be finite")
        if positive and val <= 0.0:
            raise ConfigError(
                f"{self.where}: parameter '{key}' must be positive, got {val:g}"
            )
        return val

    def integer(self, key: str, default=_MISSING, minimum: int | None = None) -> int:
        val = self.raw.pop(key, default)
        if val is _MISSING:
            raise ConfigError(f"{self.where}: missing required parameter '{key}'")
        if isinstance(val, bool) or not isinstance(val, int):
            raise ConfigError(f"{self.where}: parameter '{key}' must be an integer")
        if minimum is not None and val < minimum:
            raise ConfigError(
                f"{self.where}: parameter '{key}' must be at least {minimum}, "
                f"got {val}"
            )
        return val

    def boolean(self, key: str, default=_MISSING) -> bool:
        val = self.raw.pop(key, default)
        if val is _MISSING:
            raise ConfigError(f"{self.where}: missing required parameter '{key}'")
        if not isinstance(val, bool):
            raise ConfigError(f"{self.where}: parameter '{key}' must be a boolean")
        return val

    def vector(self, key: str, default=_MISSING, dims=(2, 3)):
        val = self.raw.pop(key, default)
        if val is _MISSING:
            raise ConfigError(f"{self.where}: missing required parameter '{key}'")
        if val is None:
            return None
        try:
            arr = np.asarray(val, dtype=float)
        except (TypeError, ValueError):
            raise ConfigError(
                f"{self.where}: parameter '{key}' must be a vector of numbers"
            ) from None
        if arr.ndim != 1 or len(arr) not in dims or not np.all(np.isfinite(arr)):
            want = " or ".join(str(d) for d in dims)
            raise ConfigError(
                f"{self.where}: parameter '{key}' must be a finite vector of "
                f"length {want}"
            )
        return arr

    def matrix(self, key: str):
        val = self.raw.pop(key, _MISSING)
        if val is _MISSING:
            raise ConfigError(f"{self.where}: missing required parameter '{key}'")
        try:
            arr = np.asarray(val, dtype=float)
        except (TypeError, ValueError):
            raise ConfigError(
                f"{self.where}: parameter '{key}' must be a matrix of numbers"
            ) from None
        if (arr.ndim != 2 or arr.shape[0] != arr.shape[1]
                or arr.shape[0] not in (2, 3) or not np.all(np.isfinite(arr))):
            raise ConfigError(
                f"{self.where}: parameter '{key}' must be a finite square "
                f"matrix of size 2 or 3"
            )
        return arr

    def string(self, key: str, default=_MISSING) -> str:
        val = self.raw.pop(key, default)
        if val is _MISSING:
            raise ConfigError(f"{self.where}: missing required parameter '{key}'")
        if val is None and default is None:
            return None
        if not isinstance(val, str) or not val:
            raise ConfigError(
                f"{self.where}: parameter '{key}' must be a non-empty string"
            )
        return val

    def sequence(self, key: str, default=_MISSING) -> list:
        val = self.raw.pop(key, default)
        if val is _MISSING:
            raise ConfigError(f"{self.where}: missing required parameter '{key}'")
        if val is None and default is None:
            return []
        if not isinstance(val, (list, tuple)) or not val:
            raise ConfigError(
                f"{self.where}: parameter '{key}' must be a non-empty list"
            )
        return list(val)

    def mapping(self, key: str, default=_MISSING) -> dict:
        val = self.raw.pop(key, default)
        if val is _MISSING:
            raise ConfigError(f"{self.where}: missing required parameter '{key}'")
        if val is None and default is None:
            return {}
        if not isinstance(val, dict):
            raise ConfigError(
                f"{self.where}: parameter '{key}' must be a JSON object"
            )
        return dict(val)

    def finish(self):
        if self.raw:
            extra = ", ".join(repr(k) for k in sorted(self.raw))
            raise ConfigError(f"{self.where}: unknown parameter(s) {extra}")


def _split_desc(desc, where: str, kinds, named: bool = True):
    """Normalize a descriptor to (kind, name, params) with diagnostics."""
    if isinstance(desc, str):
        desc = {"kind": desc}
    if not isinstance(desc, dict):
        raise ConfigError(
            f"{where}: expected an object with a 'kind' key, got "
            f"{type(desc).__name__}"
        )
    params = dict(desc)
    kind = params.pop("kind", None)
    if not isinstance(kind, str) or not kind:
        raise ConfigError(f"{where}: missing 'kind'")
    if kind not in kinds:
        known = ", ".join(sorted(kinds))
        raise ConfigError(f"{where}: unknown kind '{kind}' (known: {known})")
    if not named:
        return kind, kind, params
    name = params.pop("name", kind)
    if not isinstance(name, str) or not name:
        raise ConfigError(f"{where}: 'name' must be a non-empty string")
    return kind, name, params


# ---------------------------------------------------------------------------
# shapes


def _shape_circle(p: _Params, name: str) -> ParamCurve:
    r = p.scalar("radius", default=1.0, positive=True)
    center = p.vector("center", default=(0.0, 0.0), dims=(2,))
    p.finish()

    # arc-length parametrization, counterclockwise
    def gamma(ts):
        th = np.asarray(ts, dtype=float) / r
        return center + r * np.stack([np.cos(th), np.sin(th)], axis=-1)

    def dgamma(ts):
        th = np.asarray(ts, dtype=float) / r
        return np.stack([-np.sin(th), np.cos(th)], axis=-1)

    def ddgamma(ts):
        th = np.asarray(ts, dtype=float) / r
        return np.stack([-np.cos(th), -np.sin(th)], axis=-1) / r

    return ParamCurve(dim=2, a=0.0, b=2.0 * np.pi * r, gamma=gamma,
                      dgamma=dgamma, ddgamma=ddgamma, closed=True, name=name)


def _shape_segment(p: _Params, name: str) -> ParamCurve:
    p0 = p.vector("p0")
    p1 = p.vector("p1")
    p.finish()
    if len(p0) != len(p1):
        raise ConfigError(f"{p.where}: p0 and p1 have different dimensions")
    L = float(np.linalg.norm(p1 - p0))
    if L <= 1e-12:
        raise ConfigError(f"{p.where}: p0 and p1 coincide")
    u = (p1 - p0) / L
    dim = len(p0)

    def gamma(ts):
        return p0 + np.asarray(ts, dtype=float)[:, None] * u

    def dgamma(ts):
        return np.broadcast_to(u, (len(np.atleast_1d(ts)), dim)).copy()

    def ddgamma(ts):
        return np.zeros((len(np.atleast_1d(ts)), dim))

    return ParamCurve(dim=dim, a=0.0, b=L, gamma=gamma, dgamma=dgamma,
                      ddgamma=ddgamma, closed=False, name=name)


def _shape_ellipse(p: _Params, name: str) -> ParamCurve:
    sa = p.scalar("a", positive=True)
    sb = p.scalar("b", positive=True)
    p.finish()

    def gamma(ts):
        ts = np.asarray(ts, dtype=float)
        return np.stack([sa * np.cos(ts), sb * np.sin(ts)], axis=-1)

    def dgamma(ts):
        ts = np.asarray(ts, dtype=float)
        return np.stack([-sa * np.sin(ts), sb * np.cos(ts)], axis=-1)

    def ddgamma(ts):
        ts = np.asarray(ts, dtype=float)
        return np.stack([-sa * np.cos(ts), -sb * np.sin(ts)], axis=-1)

    return ParamCurve(dim=2, a=0.0, b=2.0 * np.pi, gamma=gamma,
                      dgamma=dgamma, ddgamma=ddgamma, closed=True, name=name)


def _shape_helix(p: _Params, name: str) -> ParamCurve:
    r = p.scalar("radius", default=1.0, positive=True)
    pitch = p.scalar("pitch")
    turns = p.scalar("turns", default=1.0, positive=True)
    p.finish()
    c = pitch / (2.0 * np.pi)

    def gamma(ts):
        ts = np.asarray(ts, dtype=float)
        return np.stack([r * np.cos(ts), r * np.sin(ts), c * ts], axis=-1)

    def dgamma(ts):
        ts = np.asarray(ts, dtype=float)
        return np.stack([-r * np.sin(ts), r * np.cos(ts),
                         np.full_like(ts, c)], axis=-1)

    def ddgamma(ts):
        ts = np.asarray(ts, dtype=float)
        return np.stack([-r * np.cos(ts), -r * np.sin(ts),
                         np.zeros_like(ts)], axis=-1)

    return ParamCurve(dim=3, a=0.0, b=2.0 * np.pi * turns, gamma=gamma,
                      dgamma=dgamma, ddgamma=ddgamma, closed=False, name=name)


def _shape_cylinder(p: _Params, name: str) -> ParamSurface:
    r = p.scalar("radius", default=1.0, positive=True)
    h = p.scalar("height", default=1.0, positive=True)
    p.finish()

    def phi(us, vs):
        us = np.asarray(us, dtype=float)
        vs = np.asarray(vs, dtype=float)
        return np.stack([r * np.cos(vs), r * np.sin(vs), us], axis=-1)

    def phi_u(us, vs):
        us = np.asarray(us, dtype=float)
        return np.stack([np.zeros_like(us), np.zeros_like(us),
                         np.ones_like(us)], axis=-1)

    def phi_v(us, vs):
        vs = np.asarray(vs, dtype=float)
        return np.stack([-r * np.sin(vs), r * np.cos(vs),
                         np.zeros_like(vs)], axis=-1)

    def phi_vv(us, vs):
        vs = np.asarray(vs, dtype=float)
        return np.stack([-r * np.cos(vs), -r * np.sin(vs),
                         np.zeros_like(vs)], axis=-1)

    return ParamSurface(a=0.0, b=h, c=0.0, d=2.0 * np.pi, phi=phi,
                        phi_u=phi_u, phi_v=phi_v, phi_vv=phi_vv, name=name)


def _shape_arc(p: _Params, name: str) -> ParamCurve:
    r = p.scalar("radius", default=1.0, positive=True)
    a0 = p.scalar("angle0")
    a1 = p.scalar("angle1")
    p.finish()
    if not a1 > a0:
        raise ConfigError(f"{p.where}: angle1 must exceed angle0")
    if a1 - a0 >= 2.0 * np.pi:
        raise ConfigError(
            f"{p.where}: arc spans a full turn or more; use a circle"
        )

    # arc-length parametrization along the circle of radius r
    def gamma(ts):
        th = a0 + np.asarray(ts, dtype=float) / r
        return r * np.stack([np.cos(th), np.sin(th)], axis=-1)

    def dgamma(ts):
        th = a0 + np.asarray(ts, dtype=float) / r
        return np.stack([-np.sin(th), np.cos(th)], axis=-1)

    def ddgamma(ts):
        th = a0 + np.asarray(ts, dtype=float) / r
        return np.stack([-np.cos(th), -np.sin(th)], axis=-1) / r

    return ParamCurve(dim=2, a=0.0, b=r * (a1 - a0), gamma=gamma,
                      dgamma=dgamma, ddgamma=ddgamma, closed=False, name=name)


SHAPE_KINDS: Mapping[str, Callable] = {
    "circle": _shape_circle,
    "segment": _shape_segment,
    "ellipse": _shape_ellipse,
    "helix": _shape_helix,
    "cylinder": _shape_cylinder,
    "arc": _shape_arc,
}


def build_shape(desc, where: str = "shape"):
    """Build a ParamCurve or ParamSurface from a descriptor."""
    kind, name, params = _split_desc(desc, where, SHAPE_KINDS)
    try:
        return SHAPE_KINDS[kind](_Params(params, where), name)
    except ConfigError:
        raise
    except ShapecalcError as exc:
        raise ConfigError(f"{where}: cannot build shape '{name}': {exc}") from exc


# ---------------------------------------------------------------------------
# fields


def _localized(nominal_X, nominal_dX, dim: int, name: str) -> AmbientField:
    """Multiply a smooth unbounded field by the hold-all cutoff.

    The cutoff is identically 1 on |p| <= CUTOFF_INNER, so values and
    Jacobians near the catalog shapes are exactly those of the nominal
    field; the product rule supplies the Jacobian in the transition shell.
    """
    span = CUTOFF_OUTER - CUTOFF_INNER

    def X(pts):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        rr = np.linalg.norm(pts, axis=1)
        w = smooth_step((rr - CUTOFF_INNER) / span)
        return w[:, None] * nominal_X(pts)

    def dX(pts):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        rr = np.linalg.norm(pts, axis=1)
        s = (rr - CUTOFF_INNER) / span
        w = smooth_step(s)
        dw = np.asarray(smooth_step_deriv(s), dtype=float) / span
        grad = np.zeros_like(pts)
        act = dw != 0.0
        if act.any():
            grad[act] = (dw[act] / rr[act])[:, None] * pts[act]
        return (w[:, None, None] * nominal_dX(pts)
                + nominal_X(pts)[:, :, None] * grad[:, None, :])

    return AmbientField(dim=dim, X=X, dX=dX,
                        support=Ball(np.zeros(dim), CUTOFF_OUTER), name=name)


def _linear_nominal(A: np.ndarray):
    def X(pts):
        return pts @ A.T

    def dX(pts):
        return np.broadcast_to(A, (len(pts), *A.shape)).copy()

    return X, dX


def _field_constant(p: _Params, name: str):
    v = p.vector("vector")
    p.finish()
    dim = len(v)

    def make(d):
        def X(pts):
            return np.broadcast_to(v, (len(pts), dim)).copy()

        def dX(pts):
            return np.zeros((len(pts), dim, dim))

        return _localized(X, dX, dim, name)

    return frozenset({dim}), make


def _field_radial(p: _Params, name: str):
    p.finish()

    def make(dim):
        # unit vector away from the origin (d=2) or the vertical axis (d=3);
        # RADIAL_EPS rounds off the singularity without moving on-shape
        # values by more than eps^2/2 relative
        proj = np.eye(dim)
        if dim == 3:
            proj[2, 2] = 0.0

        def X(pts):
            q = pts @ proj
            rho = np.sqrt((q * q).sum(axis=1) + RADIAL_EPS**2)
            return q / rho[:, None]

        def dX(pts):
            q = pts @ proj
            rho = np.sqrt((q * q).sum(axis=1) + RADIAL_EPS**2)
            return (proj[None, :, :] / rho[:, None, None]
                    - q[:, :, None] * q[:, None, :] / rho[:, None, None]**3)

        return _localized(X, dX, dim, name)

    return frozenset({2, 3}), make


def _field_rotation(p: _Params, name: str):
    axis = p.vector("axis", default=None, dims=(3,))
    p.finish()
    if axis is None:
        A = np.array([[0.0, -1.0], [1.0, 0.0]])
        return frozenset({2}), lambda d: _localized(*_linear_nominal(A), 2, name)
    nrm = float(np.linalg.norm(axis))
    if nrm <= 1e-12:
        raise ConfigError(f"{p.where}: parameter 'axis' must be nonzero")
    ax = axis / nrm
    A = np.array([[0.0, -ax[2], ax[1]],
                  [ax[2], 0.0, -ax[0]],
                  [-ax[1], ax[0], 0.0]])
    return frozenset({3}), lambda d: _localized(*_linear_nominal(A), 3, name)


def _field_linear(p: _Params, name: str):
    A = p.matrix("matrix")
    p.finish()
    dim = A.shape[0]
    return frozenset({dim}), lambda d: _localized(*_linear_nominal(A), dim, name)


def _field_bump(p: _Params, name: str):
    center = p.vector("center")
    radius = p.scalar("radius", positive=True)
    direction = p.vector("dir", dims=(len(center),))
    p.finish()
    dim = len(center)
    return frozenset({dim}), lambda d: bump_field(center, radius, direction,
                                                  dim=dim, name=name)


def _field_sum(p: _Params, name: str):
    raw_terms = p.sequence("terms")
    p.finish()
    parsed = [parse_field(t, where=f"{p.where}.terms[{i}]")
              for i, t in enumerate(raw_terms)]
    dims = frozenset.intersection(*[q.dims for q in parsed])
    if not dims:
        raise ConfigError(f"{p.where}: terms have no common dimension")

    def make(dim):
        return sum_field([q.build(dim) for q in parsed], name=name)

    return dims, make


FIELD_KINDS: Mapping[str, Callable] = {
    "constant": _field_constant,
    "radial": _field_radial,
    "rotation": _field_rotation,
    "linear": _field_linear,
    "bump": _field_bump,
    "sum": _field_sum,
}


@dataclass(frozen=True)
class ParsedField:
    """Validated field descriptor, instantiable per ambient dimension."""

    name: str
    dims: frozenset
    where: str
    _make: Callable[[int], AmbientField] = field(repr=False)

    def build(self, dim: int) -> AmbientField:
        if dim not in self.dims:
            have = " or ".join(str(d) for d in sorted(self.dims))
            raise ConfigError(
                f"{self.where}: field '{self.name}' lives in dimension "
                f"{have}, not {dim}"
            )
        try:
            return self._make(dim)
        except ConfigError:
            raise
        except ShapecalcError as exc:
            raise ConfigError(
                f"{self.where}: cannot build field '{self.name}': {exc}"
            ) from exc


def parse_field(desc, where: str = "field") -> ParsedField:
    """Validate a field descriptor; building is deferred per dimension."""
    kind, name, params = _split_desc(desc, where, FIELD_KINDS)
    dims, make = FIELD_KINDS[kind](_Params(params, where), name)
    return ParsedField(name=name, dims=dims, where=where, _make=make)


def build_field(desc, dim: int, where: str = "field") -> AmbientField:
    return parse_field(desc, where).build(dim)


# ---------------------------------------------------------------------------
# functionals


FUNCTIONAL_KINDS = ("length", "area", "elastic", "crack")


@dataclass(frozen=True)
class ParsedFunctional:
    """A functional plus, for crack functionals, the crack curve it acts on."""

    functional: object
    crack: ParamCurve | None = None


def parse_functional(desc, shapes: Mapping[str, object],
                     where: str = "functional") -> ParsedFunctional:
    """Resolve a functional descriptor; cracks reference shapes by name."""
    kind, _, params = _split_desc(desc, where, FUNCTIONAL_KINDS, named=False)
    p = _Params(params, where)
    if kind == "length":
        p.finish()
        return ParsedFunctional(length_functional())
    if kind == "area":
        p.finish()
        return ParsedFunctional(area_functional())
    if kind == "elastic":
        p.finish()
        return ParsedFunctional(elastic_functional())

    inner_kind = p.string("inner", default="length")
    crack_name = p.string("crack")
    center = p.vector("region_center")
    radius = p.scalar("region_radius", positive=True)
    p.finish()
    if inner_kind not in ("length", "elastic"):
        raise ConfigError(
            f"{where}: crack inner functional must be 'length' or 'elastic', "
            f"got '{inner_kind}'"
        )
    if crack_name not in shapes:
        known = ", ".join(sorted(shapes)) or "none defined"
        raise ConfigError(
            f"{where}: crack references unknown shape '{crack_name}' "
            f"(shapes: {known})"
        )
    crack = shapes[crack_name]
    if not isinstance(crack, ParamCurve) or crack.closed:
        raise ConfigError(
            f"{where}: crack shape '{crack_name}' must be an open curve"
        )
    if len(center) != crack.dim:
        raise ConfigError(
            f"{where}: region_center has dimension {len(center)}, crack "
            f"'{crack_name}' has dimension {crack.dim}"
        )
    inner = length_functional() if inner_kind == "length" else elastic_functional()
    try:
        fn = crack_functional(Ball(center, radius), crack, inner=inner)
    except ConfigError:
        raise
    except ShapecalcError as exc:
        raise ConfigError(f"{where}: {exc}") from exc
    return ParsedFunctional(fn, crack=crack)


def compatible(functional, shape) -> bool:
    """Whether a (functional, shape) pairing is well-posed.

    length takes any curve, area any surface, elastic planar arc-length
    curves.  Crack functionals are tied to the crack curve they were built
    around and never enter the generic cross product.
    """
    if isinstance(functional, CrackFunctional):
        return False
    if functional.name == "length":
        return isinstance(shape, ParamCurve)
    if functional.name == "area":
        return isinstance(shape, ParamSurface)
    if functional.name == "elastic":
        if not (isinstance(shape, ParamCurve) and shape.dim == 2):
            return False
        speed = np.linalg.norm(
            np.asarray(shape.dgamma(shape._grid_ts), dtype=float), axis=1)
        return float(np.abs(speed - 1.0).max()) <= ARC_LENGTH_TOL
    return False
