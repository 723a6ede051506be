"""Shape functionals on curves and surfaces with closed-form first variations.

Sign conventions inherited from the geometry module (planar N = 90-degree
CCW rotation of T, signed planar curvature, surface N = phi_u x phi_v,
outward boundary (co)normals) pin every formula below; each global sign was
fixed by matching a finite-difference derivative on circle / segment /
cylinder model cases:

  d length(X)  = -int kappa (X.N) ds + (X.T)(b) - (X.T)(a)
               =  int T.(dX T) ds                       (Jacobian form)
  d area(X)    =  int H (X.N) dA + sum_sides int (X.nu) |phi_v| dv
  d elastic(X) =  int (2 kappa'' + kappa^3)(X.N) ds
                 + [kappa^2 (X.T) + 2 kappa d/ds(X.N) - 2 kappa' (X.N)]_a^b

with the brackets dropped on closed curves / u-closed surfaces.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import (CrackNotInterior, DegenerateFrame, InvariantViolation,
                     NotArcLength)
from .fields import AmbientField, Ball
from .geometry import (GL_NODES, GL_WEIGHTS, ParamCurve, ParamSurface,
                       boundary_outward_normal, curvature,
                       curve_curvature_derivs, curve_frame, integrate_curve,
                       integrate_surface, surface_mean_curvature,
                       surface_normal)

ARC_LENGTH_TOL = 1e-8
# default quadrature resolution: fine enough that sharply modulated probe
# fields (compactly supported bumps) are integrated well below the
# comparison tolerances
CURVE_PANELS = 512
SURFACE_PANELS = (8, 24)
SIDE_PANELS = 64


@dataclass(frozen=True)
class ShapeFunctional:
    """A real-valued functional of a parametric manifold.

    evaluate must be reparametrization-invariant; analytic_derivative, when
    present, returns the closed-form first variation along an ambient field.
    """

    name: str
    evaluate: Callable[[object], float]
    analytic_derivative: Optional[Callable[[object, AmbientField], float]] = None


# ---------------------------------------------------------------------------
# length


def length(curve: ParamCurve, panels: int = CURVE_PANELS) -> float:
    """Arc length by composite Gauss-Legendre quadrature."""
    return integrate_curve(curve, lambda ts: np.ones_like(ts), panels=panels)


def _unit_tangent_at(curve: ParamCurve, t: float) -> np.ndarray:
    d1 = np.asarray(curve.dgamma(np.array([t])), dtype=float)[0]
    return d1 / np.linalg.norm(d1)


def _dlength_hadamard(curve: ParamCurve, X: AmbientField) -> float:
    def density(ts):
        fr = curve_frame(curve, ts)
        xv = np.asarray(X.X(np.asarray(curve.gamma(ts), dtype=float)), dtype=float)
        return -fr.kappa * np.einsum("ij,ij->i", xv, fr.N)

    total = integrate_curve(curve, density, panels=CURVE_PANELS)
    if not curve.closed:
        for t, sgn in ((curve.b, 1.0), (curve.a, -1.0)):
            T = _unit_tangent_at(curve, t)
            xv = np.asarray(X.X(np.asarray(curve.gamma(np.array([t])), dtype=float)),
                            dtype=float)[0]
            total += sgn * float(xv @ T)
    return total


def _dlength_jacobian(curve: ParamCurve, X: AmbientField) -> float:
    def density(ts):
        d1 = np.asarray(curve.dgamma(ts), dtype=float)
        T = d1 / np.linalg.norm(d1, axis=1)[:, None]
        J = np.asarray(X.dX(np.asarray(curve.gamma(ts), dtype=float)), dtype=float)
        return np.einsum("ni,nij,nj->n", T, J, T)

    return integrate_curve(curve, density, panels=CURVE_PANELS)


def analytic_dlength(curve: ParamCurve, X: AmbientField,
                     form: str = "auto") -> float:
    """First variation of arc length along X.

    The curvature form (with its tangential boundary terms) is used when
    unit normals exist on the quadrature grid; straight pieces of a space
    curve make the normal undefined, and the tangent-Jacobian form, which
    needs no frame, takes over.  Both forms agree wherever both exist.
    """
    if form == "jacobian":
        return _dlength_jacobian(curve, X)
    if form == "hadamard":
        return _dlength_hadamard(curve, X)
    if form != "auto":
        raise ValueError("form must be 'auto', 'hadamard' or 'jacobian'")
    if curve.dim == 2:
        return _dlength_hadamard(curve, X)
    try:
        return _dlength_hadamard(curve, X)
    except DegenerateFrame:
        return _dlength_jacobian(curve, X)


# ---------------------------------------------------------------------------
# surface area


def surface_area(surf: ParamSurface, panels: tuple[int, int] = SURFACE_PANELS) -> float:
    """Area by composite Gauss-Legendre quadrature of |phi_u x phi_v|."""
    return integrate_surface(surf, lambda us, vs: np.ones_like(us), panels=panels)


def _side_flux(surf: ParamSurface, X: AmbientField, end: str,
               panels: int = SIDE_PANELS) -> float:
    # int_c^d (X . nu_out)(phi(u0, v)) |phi_v(u0, v)| dv on one u-side
    edges = np.linspace(surf.c, surf.d, panels + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])
    halfw = 0.5 * (edges[1] - edges[0])
    vn = (mid[:, None] + halfw * GL_NODES[None, :]).ravel()
    wts = np.tile(halfw * GL_WEIGHTS, panels)
    u0 = surf.a if end == "a" else surf.b
    us = np.full_like(vn, u0)
    nu = boundary_outward_normal(surf, end, vn)
    pv = np.asarray(surf.phi_v(us, vn), dtype=float)
    xv = np.asarray(X.X(np.asarray(surf.phi(us, vn), dtype=float)), dtype=float)
    vals = np.einsum("ij,ij->i", xv, nu) * np.linalg.norm(pv, axis=1)
    return float(np.sum(wts * vals))


def analytic_darea(surf: ParamSurface, X: AmbientField) -> float:
    """First variation of area: mean-curvature interior term plus outward
    flux through the u-side boundary circles (absent when u-closed)."""
    if not surf.periodic_v:
        raise InvariantViolation(
            f"surface '{surf.name}': area variation needs a v-periodic chart"
        )

    def density(us, vs):
        H = surface_mean_curvature(surf, us, vs)
        N = surface_normal(surf, us, vs)
        xv = np.asarray(X.X(np.asarray(surf.phi(us, vs), dtype=float)), dtype=float)
        return H * np.einsum("ij,ij->i", xv, np.atleast_2d(N))

    total = integrate_surface(surf, density, panels=SURFACE_PANELS)
    if not surf.u_closed:
        total += _side_flux(surf, X, "b") + _side_flux(surf, X, "a")
    return total


# ---------------------------------------------------------------------------
# elastic (bending) energy


def _require_arc_length(curve: ParamCurve):
    speed = np.linalg.norm(
        np.asarray(curve.dgamma(curve._grid_ts), dtype=float), axis=1)
    dev = float(np.abs(speed - 1.0).max())
    if dev > ARC_LENGTH_TOL:
        raise NotArcLength(
            f"curve '{curve.name}': |gamma'| deviates from 1 by {dev:.3e}"
        )


def bending_energy(curve: ParamCurve, panels: int = CURVE_PANELS) -> float:
    """int kappa^2 ds in any regular parametrization."""
    return integrate_curve(curve, lambda ts: curvature(curve, ts) ** 2,
                           panels=panels)


def elastic_energy(curve: ParamCurve, panels: int = CURVE_PANELS) -> float:
    """int kappa^2 ds for an arc-length parametrized curve.

    Raises NotArcLength when |gamma'| strays from 1 beyond 1e-8; the
    parametrization-free bending_energy has no such restriction.
    """
    _require_arc_length(curve)
    return bending_energy(curve, panels=panels)


def analytic_delastic(curve: ParamCurve, X: AmbientField) -> float:
    """First variation of int kappa^2 ds for planar arc-length curves.

    Interior density (2 kappa'' + kappa^3)(X.N); open ends add
    kappa^2 (X.T) + 2 kappa d/ds(X.N) - 2 kappa' (X.N), where d/ds(X.N)
    expands to (dX T).N - kappa (X.T) since N' = -kappa T.
    """
    if curve.dim != 2:
        raise InvariantViolation(
            "elastic first variation is implemented for planar curves"
        )
    _require_arc_length(curve)

    def density(ts):
        fr = curve_frame(curve, ts)
        _, _, k2 = curve_curvature_derivs(curve, ts)
        xv = np.asarray(X.X(np.asarray(curve.gamma(ts), dtype=float)), dtype=float)
        return (2.0 * k2 + fr.kappa**3) * np.einsum("ij,ij->i", xv, fr.N)

    total = integrate_curve(curve, density, panels=CURVE_PANELS)
    if curve.closed:
        return total
    for t, sgn in ((curve.b, 1.0), (curve.a, -1.0)):
        fr = curve_frame(curve, t)
        k, k1, _ = curve_curvature_derivs(curve, t)
        p = np.asarray(curve.gamma(np.array([t])), dtype=float)
        xv = np.asarray(X.X(p), dtype=float)[0]
        dxv = np.asarray(X.dX(p), dtype=float)[0]
        x_t = float(xv @ fr.T)
        x_n = float(xv @ fr.N)
        dxn_ds = float((dxv @ fr.T) @ fr.N) - k * x_t
        total += sgn * (k**2 * x_t + 2.0 * k * dxn_ds - 2.0 * k1 * x_n)
    return total


# ---------------------------------------------------------------------------
# functional objects and the cracked-set wrapper


def length_functional(panels: int = CURVE_PANELS) -> ShapeFunctional:
    # the default resolves sharply localized probe fields; callers pairing
    # the functional with smooth fields only may pass something coarser
    return ShapeFunctional("length", lambda c: length(c, panels=panels),
                           analytic_dlength)


def area_functional(panels: tuple[int, int] = SURFACE_PANELS) -> ShapeFunctional:
    return ShapeFunctional("area", lambda s: surface_area(s, panels=panels),
                           analytic_darea)


def elastic_functional(panels: int = CURVE_PANELS) -> ShapeFunctional:
    # bending_energy keeps the value well-defined on flowed (no longer
    # arc-length) transports of an arc-length base curve
    return ShapeFunctional("elastic", lambda c: bending_energy(c, panels=panels),
                           analytic_delastic)


@dataclass(frozen=True)
class CrackFunctional:
    """Functional of a cracked set Omega \\ Sigma, driven entirely by the
    crack Sigma: the complement's geometry is fixed, so evaluation and
    first variation delegate to the inner curve functional.

    `margin` is the clearance between the crack and the region boundary at
    construction; probe fields must fit inside it.
    """

    name: str
    region: Ball
    inner: ShapeFunctional
    margin: float
    evaluate: Callable[[object], float] = field(init=False)
    analytic_derivative: Optional[Callable] = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "evaluate", self.inner.evaluate)
        object.__setattr__(self, "analytic_derivative",
                           self.inner.analytic_derivative)

    def require_probe(self, radius: float):
        """Probe balls of this radius must stay inside the region."""
        if radius >= self.margin:
            raise CrackNotInterior(
                f"probe radius {radius:g} reaches the region boundary "
                f"(clearance {self.margin:g})"
            )


def crack_functional(region: Ball, crack: ParamCurve,
                     inner: ShapeFunctional | None = None) -> CrackFunctional:
    """Wrap a curve functional as a functional of the set region \\ crack.

    The crack must sit strictly inside the region; CrackNotInterior
    otherwise.
    """
    if inner is None:
        inner = length_functional()
    dmax = float(np.linalg.norm(crack._grid_points - region.center, axis=1).max())
    margin = region.radius - dmax
    if margin <= 0.0:
        raise CrackNotInterior(
            f"crack '{crack.name}' is not strictly inside the region "
            f"(max point distance {dmax:g} vs radius {region.radius:g})"
        )
    return CrackFunctional(name=f"crack[{inner.name}@{crack.name}]", region=region,
                           inner=inner, margin=margin)
