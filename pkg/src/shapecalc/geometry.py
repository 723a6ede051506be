"""Parametrized curves and surfaces.

Conventions, fixed once and used by every downstream module:

* plane curves: N is the tangent rotated 90 degrees counter-clockwise,
  curvature is signed via T' = v*kappa*N (unit CCW circle has kappa = +1);
* space curves: kappa = |gamma' x gamma''| / v^3 >= 0, N = T'/|T'|
  (undefined where the curve is straight -> DegenerateFrame);
* surfaces: N = phi_u x phi_v / |phi_u x phi_v|; the mean curvature returned
  by surface_mean_curvature is the trace of the Weingarten map in the
  {phi_u, phi_v} basis, so its sign is tied to the orientation of N;
* outward boundary normals: -T(a) / +T(b) at curve ends, and
  -+ phi_v x N / |phi_v| on the u = a / u = b sides of a surface.

All parametrization callables are vectorized: a curve maps (n,) parameter
arrays to (n, dim) points, a surface maps a pair of (n,) arrays to (n, 3).
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ._stencil import sample_derivative
from .errors import (
    DegenerateFrame,
    DegenerateImmersion,
    IllConditioned,
    InvariantViolation,
    NoBoundary,
)

GL_NODES, GL_WEIGHTS = np.polynomial.legendre.leggauss(5)

_CHECK_RNG_SEED = 1097


def _as_params(t) -> tuple[np.ndarray, bool]:
    """Return (1d float array, was_scalar)."""
    arr = np.asarray(t, dtype=float)
    scalar = arr.ndim == 0
    return np.atleast_1d(arr), scalar


def _cross2(u: np.ndarray, w: np.ndarray) -> np.ndarray:
    return u[..., 0] * w[..., 1] - u[..., 1] * w[..., 0]


# ---------------------------------------------------------------------------
# types


@dataclass(frozen=True)
class ParamCurve:
    """Regular parametrized curve gamma: [a, b] -> R^dim (dim = 2 or 3).

    gamma, dgamma, ddgamma map (n,) parameter arrays to (n, dim) values.
    Construction runs desk checks: regularity and an embedding test on a
    dense grid, endpoint matching for closed curves, and a finite-difference
    consistency test of the supplied derivatives.

    transported marks curves produced by numerically flowing another curve;
    their derivative callables carry integrator and Jacobian-transport
    noise (~1e-11 absolute), so the endpoint-matching and FD-consistency
    tolerances are relaxed accordingly.  Hand-written charts stay strict.
    """

    dim: int
    a: float
    b: float
    gamma: Callable[[np.ndarray], np.ndarray]
    dgamma: Callable[[np.ndarray], np.ndarray]
    ddgamma: Callable[[np.ndarray], np.ndarray]
    closed: bool
    name: str = "curve"
    transported: bool = False

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise InvariantViolation(f"curve '{self.name}': dim must be 2 or 3")
        if not self.b > self.a:
            raise InvariantViolation(f"curve '{self.name}': need b > a")
        n = 512
        if self.closed:
            grid = np.linspace(self.a, self.b, n + 1)[:-1]
        else:
            grid = np.linspace(self.a, self.b, n)
        pts = np.asarray(self.gamma(grid), dtype=float)
        if pts.shape != (n, self.dim) or not np.all(np.isfinite(pts)):
            raise InvariantViolation(
                f"curve '{self.name}': gamma must map (n,) to finite (n, {self.dim})"
            )
        vel = np.asarray(self.dgamma(grid), dtype=float)
        speed = np.linalg.norm(vel, axis=1)
        if speed.min() <= 1e-12 * max(1.0, speed.max()):
            raise DegenerateImmersion(
                f"curve '{self.name}': speed vanishes near t = {grid[speed.argmin()]:g}"
            )
        # embedding desk check: non-adjacent samples must stay separated
        diff = pts[:, None, :] - pts[None, :, :]
        dist = np.linalg.norm(diff, axis=2)
        diam = dist.max()
        idx = np.arange(n)
        gap = np.abs(idx[:, None] - idx[None, :])
        if self.closed:
            gap = np.minimum(gap, n - gap)
        nonadj = gap > 1
        if nonadj.any() and dist[nonadj].min() < 1e-7 * diam:
            raise DegenerateImmersion(
                f"curve '{self.name}': samples nearly coincide (self-intersection?)"
            )
        scale = 1.0 + np.abs(pts).max()
        # transported curves inherit integrator noise in their derivatives
        slack = 1e3 if self.transported else 1.0
        if self.closed:
            ends = np.array([self.a, self.b])
            for fn, label, tol in (
                (self.gamma, "gamma", 1e-12 * scale * slack),
                (self.dgamma, "dgamma", 1e-12 * scale * slack),
                (self.ddgamma, "ddgamma", 1e-8 * scale * slack),
            ):
                va, vb = np.asarray(fn(ends), dtype=float)
                if np.linalg.norm(va - vb) > tol:
                    raise InvariantViolation(
                        f"curve '{self.name}': closed but {label}(a) != {label}(b)"
                    )
        self._check_derivative_consistency(grid, pts, vel)
        object.__setattr__(self, "_grid_ts", grid)
        object.__setattr__(self, "_grid_points", pts)
        object.__setattr__(self, "_diameter", float(diam))

    def _check_derivative_consistency(self, grid, pts, vel):
        rng = np.random.default_rng(_CHECK_RNG_SEED)
        h = 1e-6 * (self.b - self.a)
        ts = rng.uniform(self.a + 2 * h, self.b - 2 * h, 32)
        for fn, dfn, label in (
            (self.gamma, self.dgamma, "dgamma"),
            (self.dgamma, self.ddgamma, "ddgamma"),
        ):
            fd = (np.asarray(fn(ts + h)) - np.asarray(fn(ts - h))) / (2 * h)
            got = np.asarray(dfn(ts), dtype=float)
            err = np.linalg.norm(fd - got, axis=1)
            rel = err / (1.0 + np.linalg.norm(got, axis=1))
            rel_tol = 1e-5 if self.transported else 1e-6
            if rel.max() > rel_tol:
                raise InvariantViolation(
                    f"curve '{self.name}': {label} disagrees with finite differences "
                    f"near t = {ts[rel.argmax()]:g} (rel {rel.max():.2e})"
                )

    @property
    def diameter(self) -> float:
        return self._diameter

    def reversed(self) -> "ParamCurve":
        """Same point set traversed with t -> a + b - t."""
        a, b = self.a, self.b
        return ParamCurve(
            dim=self.dim,
            a=a,
            b=b,
            gamma=lambda t: self.gamma(a + b - np.asarray(t, dtype=float)),
            dgamma=lambda t: -np.asarray(self.dgamma(a + b - np.asarray(t, dtype=float))),
            ddgamma=lambda t: np.asarray(self.ddgamma(a + b - np.asarray(t, dtype=float))),
            closed=self.closed,
            name=self.name + "_rev",
            transported=self.transported,
        )


@dataclass(frozen=True)
class ParamSurface:
    """Regular parametrized surface phi: [a,b] x [c,d] -> R^3.

    phi, phi_u, phi_v, phi_vv map pairs of (n,) arrays to (n, 3).  Whether
    the surface closes up in v (cylinder-like seam) or in u is detected at
    construction and stored in periodic_v / u_closed; operations that need
    the cylinder topology check those flags.

    transported marks surfaces produced by numerically flowing another
    surface; seam detection and consistency checks then tolerate the
    integrator and Jacobian-transport noise in the derivative callables.
    """

    a: float
    b: float
    c: float
    d: float
    phi: Callable[[np.ndarray, np.ndarray], np.ndarray]
    phi_u: Callable[[np.ndarray, np.ndarray], np.ndarray]
    phi_v: Callable[[np.ndarray, np.ndarray], np.ndarray]
    phi_vv: Callable[[np.ndarray, np.ndarray], np.ndarray]
    name: str = "surface"
    transported: bool = False

    dim = 3

    def __post_init__(self):
        if not (self.b > self.a and self.d > self.c):
            raise InvariantViolation(f"surface '{self.name}': empty parameter box")
        n = 24
        us = np.linspace(self.a, self.b, n)
        vs = np.linspace(self.c, self.d, n)
        U, V = np.meshgrid(us, vs, indexing="ij")
        uu, vv = U.ravel(), V.ravel()
        pts = np.asarray(self.phi(uu, vv), dtype=float)
        if pts.shape != (n * n, 3) or not np.all(np.isfinite(pts)):
            raise InvariantViolation(
                f"surface '{self.name}': phi must map (n,),(n,) to finite (n, 3)"
            )
        pu = np.asarray(self.phi_u(uu, vv), dtype=float)
        pv = np.asarray(self.phi_v(uu, vv), dtype=float)
        jac = np.linalg.norm(np.cross(pu, pv), axis=1)
        if jac.min() <= 1e-12 * max(1.0, jac.max()):
            k = jac.argmin()
            raise DegenerateImmersion(
                f"surface '{self.name}': |phi_u x phi_v| vanishes near "
                f"(u, v) = ({uu[k]:g}, {vv[k]:g})"
            )
        scale = 1.0 + np.abs(pts).max()
        # seam detection; transported charts match only up to integrator noise
        tol = (1e-6 if self.transported else 1e-12) * scale
        per_v = all(
            np.abs(np.asarray(fn(us, np.full(n, self.c)))
                   - np.asarray(fn(us, np.full(n, self.d)))).max() <= tol
            for fn in (self.phi, self.phi_v, self.phi_vv)
        )
        object.__setattr__(self, "periodic_v", bool(per_v))
        u_closed = all(
            np.abs(np.asarray(fn(np.full(n, self.a), vs))
                   - np.asarray(fn(np.full(n, self.b), vs))).max() <= tol
            for fn in (self.phi, self.phi_u, self.phi_v)
        )
        object.__setattr__(self, "u_closed", bool(u_closed))
        # embedding desk check, adjacency on the sample grid (8-neighborhood)
        dist = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=2)
        diam = dist.max()
        iu, iv = np.divmod(np.arange(n * n), n)
        du = np.abs(iu[:, None] - iu[None, :])
        dv = np.abs(iv[:, None] - iv[None, :])
        if u_closed:
            du = np.minimum(du, n - 1 - du)
        if per_v:
            dv = np.minimum(dv, n - 1 - dv)
        nonadj = (du > 1) | (dv > 1)
        if nonadj.any() and dist[nonadj].min() < 1e-7 * diam:
            raise DegenerateImmersion(
                f"surface '{self.name}': samples nearly coincide (self-intersection?)"
            )
        self._check_derivative_consistency()
        object.__setattr__(self, "_diameter", float(diam))

    def _check_derivative_consistency(self):
        rng = np.random.default_rng(_CHECK_RNG_SEED + 1)
        hu = 1e-6 * (self.b - self.a)
        hv = 1e-6 * (self.d - self.c)
        us = rng.uniform(self.a + 2 * hu, self.b - 2 * hu, 32)
        vs = rng.uniform(self.c + 2 * hv, self.d - 2 * hv, 32)
        checks = (
            (lambda u, v: self.phi(u, v), self.phi_u, "phi_u", hu, True),
            (lambda u, v: self.phi(u, v), self.phi_v, "phi_v", hv, False),
            (lambda u, v: self.phi_v(u, v), self.phi_vv, "phi_vv", hv, False),
        )
        for fn, dfn, label, h, along_u in checks:
            if along_u:
                fd = (np.asarray(fn(us + h, vs)) - np.asarray(fn(us - h, vs))) / (2 * h)
            else:
                fd = (np.asarray(fn(us, vs + h)) - np.asarray(fn(us, vs - h))) / (2 * h)
            got = np.asarray(dfn(us, vs), dtype=float)
            rel = np.linalg.norm(fd - got, axis=1) / (1.0 + np.linalg.norm(got, axis=1))
            rel_tol = 1e-5 if self.transported else 1e-6
            if rel.max() > rel_tol:
                raise InvariantViolation(
                    f"surface '{self.name}': {label} disagrees with finite differences "
                    f"(rel {rel.max():.2e})"
                )

    @property
    def diameter(self) -> float:
        return self._diameter


@dataclass(frozen=True)
class FrenetFrame:
    """Frame data along a curve: unit tangent T, unit normal N, binormal B
    (None in the plane), scalar speed v = |gamma'| and curvature kappa."""

    T: np.ndarray
    N: np.ndarray
    B: np.ndarray | None
    speed: np.ndarray
    kappa: np.ndarray


# ---------------------------------------------------------------------------
# frames and curvature


def curvature(curve: ParamCurve, t) -> np.ndarray:
    """Curvature without frame construction (safe where a 3d curve is straight).

    Signed in the plane, |gamma' x gamma''|/v^3 >= 0 in space.
    """
    ts, scalar = _as_params(t)
    d1 = np.asarray(curve.dgamma(ts), dtype=float)
    d2 = np.asarray(curve.ddgamma(ts), dtype=float)
    v = np.linalg.norm(d1, axis=1)
    if curve.dim == 2:
        kap = _cross2(d1, d2) / v**3
    else:
        kap = np.linalg.norm(np.cross(d1, d2), axis=1) / v**3
    return kap[0] if scalar else kap


def curve_frame(curve: ParamCurve, t) -> FrenetFrame:
    """Tangent/normal frame, speed and curvature at parameter(s) t."""
    ts, scalar = _as_params(t)
    d1 = np.asarray(curve.dgamma(ts), dtype=float)
    d2 = np.asarray(curve.ddgamma(ts), dtype=float)
    v = np.linalg.norm(d1, axis=1)
    if v.min() <= 1e-12:
        raise DegenerateImmersion(
            f"curve '{curve.name}': zero speed at t = {ts[v.argmin()]:g}"
        )
    T = d1 / v[:, None]
    if curve.dim == 2:
        N = np.stack([-T[:, 1], T[:, 0]], axis=-1)
        kap = _cross2(d1, d2) / v**3
        B = None
    else:
        kap = np.linalg.norm(np.cross(d1, d2), axis=1) / v**3
        Tp = (d2 - T * np.einsum("ij,ij->i", T, d2)[:, None]) / v[:, None]
        nTp = np.linalg.norm(Tp, axis=1)
        if nTp.min() <= 1e-12 * (1.0 + np.linalg.norm(d2, axis=1).max()):
            raise DegenerateFrame(
                f"curve '{curve.name}': unit normal undefined at t = "
                f"{ts[nTp.argmin()]:g} (straight segment)"
            )
        N = Tp / nTp[:, None]
        B = np.cross(T, N)
    if scalar:
        return FrenetFrame(T[0], N[0], None if B is None else B[0],
                           float(v[0]), float(kap[0]))
    return FrenetFrame(T, N, B, v, kap)


def curve_curvature_derivs(curve: ParamCurve, t, h: float | None = None):
    """(kappa, dkappa/ds, d2kappa/ds2) at parameter(s) t.

    Parameter derivatives of kappa use central differences with one
    Richardson step (5-point stencils, shifted inside [a, b] near open ends),
    then the chain rule converts to arc-length derivatives.
    """
    ts, scalar = _as_params(t)
    if h is None:
        h = 1e-4 * (curve.b - curve.a)
    kfun = lambda s: np.asarray(curvature(curve, s))
    k = kfun(ts)
    k1 = sample_derivative(kfun, ts, h, 1, curve.a, curve.b, periodic=curve.closed)
    k2 = sample_derivative(kfun, ts, h, 2, curve.a, curve.b, periodic=curve.closed)
    d1 = np.asarray(curve.dgamma(ts), dtype=float)
    d2 = np.asarray(curve.ddgamma(ts), dtype=float)
    v = np.linalg.norm(d1, axis=1)
    vp = np.einsum("ij,ij->i", d1, d2) / v
    dk_ds = k1 / v
    d2k_ds2 = k2 / v**2 - k1 * vp / v**3
    if scalar:
        return float(k[0]), float(dk_ds[0]), float(d2k_ds2[0])
    return k, dk_ds, d2k_ds2


# ---------------------------------------------------------------------------
# surface normal and mean curvature


def surface_normal(surf: ParamSurface, u, v) -> np.ndarray:
    """Unit normal phi_u x phi_v / |...| at parameter(s) (u, v)."""
    us, scalar = _as_params(u)
    vs, _ = _as_params(v)
    us, vs = np.broadcast_arrays(us, vs)
    cr = np.cross(np.asarray(surf.phi_u(us, vs), dtype=float),
                  np.asarray(surf.phi_v(us, vs), dtype=float))
    ncr = np.linalg.norm(cr, axis=1)
    if ncr.min() <= 1e-12:
        k = ncr.argmin()
        raise DegenerateImmersion(
            f"surface '{surf.name}': normal undefined at ({us[k]:g}, {vs[k]:g})"
        )
    N = cr / ncr[:, None]
    return N[0] if scalar else N


def surface_mean_curvature(surf: ParamSurface, u, v, h: float | None = None):
    """Trace of the Weingarten map in the {phi_u, phi_v} basis.

    N_u and N_v come from 5-point differences of the unit normal; their
    tangent coordinates solve the 2x2 Gram systems.  Sign follows the
    orientation of N (cylinder with inward N gives H = -1/r).
    """
    us, scalar = _as_params(u)
    vs, _ = _as_params(v)
    us, vs = np.broadcast_arrays(us, vs)
    us, vs = np.ascontiguousarray(us), np.ascontiguousarray(vs)
    if h is None:
        h = 1e-5 * min(surf.b - surf.a, surf.d - surf.c)
    Nu = sample_derivative(
        lambda uu: surface_normal(surf, uu, np.repeat(vs, 5)),
        us, h, 1, surf.a, surf.b, periodic=surf.u_closed)
    Nv = sample_derivative(
        lambda vv: surface_normal(surf, np.repeat(us, 5), vv),
        vs, h, 1, surf.c, surf.d, periodic=surf.periodic_v)
    pu = np.asarray(surf.phi_u(us, vs), dtype=float)
    pv = np.asarray(surf.phi_v(us, vs), dtype=float)
    E = np.einsum("ij,ij->i", pu, pu)
    F = np.einsum("ij,ij->i", pu, pv)
    G = np.einsum("ij,ij->i", pv, pv)
    half = 0.5 * (E + G)
    disc = np.sqrt(np.maximum(0.25 * (E - G) ** 2 + F**2, 0.0))
    lo, hi2 = half - disc, half + disc
    if np.any(hi2 > 1e10 * np.maximum(lo, 1e-300)):
        raise IllConditioned(
            f"surface '{surf.name}': tangent Gram system condition exceeds 1e10"
        )
    det = E * G - F * F
    # alpha1 = coordinate of N_u along phi_u, alpha4 = N_v along phi_v
    a1 = (G * np.einsum("ij,ij->i", pu, Nu) - F * np.einsum("ij,ij->i", pv, Nu)) / det
    a4 = (E * np.einsum("ij,ij->i", pv, Nv) - F * np.einsum("ij,ij->i", pu, Nv)) / det
    H = a1 + a4
    return float(H[0]) if scalar else H


# ---------------------------------------------------------------------------
# quadrature


def integrate_curve(curve: ParamCurve, density: Callable[[np.ndarray], np.ndarray],
                    panels: int = 64) -> float:
    """Integral of density(t) against the arc-length measure |gamma'(t)| dt.

    Composite 5-point Gauss-Legendre with `panels` equal panels.  Non-finite
    density values propagate to a NaN result (with a warning).
    """
    edges = np.linspace(curve.a, curve.b, panels + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])
    halfw = 0.5 * (edges[1] - edges[0])
    nodes = (mid[:, None] + halfw * GL_NODES[None, :]).ravel()
    wts = np.tile(halfw * GL_WEIGHTS, panels)
    speed = np.linalg.norm(np.asarray(curve.dgamma(nodes), dtype=float), axis=1)
    vals = np.asarray(density(nodes), dtype=float)
    total = float(np.sum(wts * vals * speed))
    if not np.isfinite(total):
        warnings.warn(f"integrate_curve('{curve.name}'): non-finite density",
                      RuntimeWarning, stacklevel=2)
    return total


def integrate_surface(surf: ParamSurface,
                      density: Callable[[np.ndarray, np.ndarray], np.ndarray],
                      panels: tuple[int, int] = (16, 16)) -> float:
    """Integral of density(u, v) against the area measure |phi_u x phi_v| du dv."""
    pu_, pv_ = panels
    eu = np.linspace(surf.a, surf.b, pu_ + 1)
    ev = np.linspace(surf.c, surf.d, pv_ + 1)
    mu = 0.5 * (eu[:-1] + eu[1:])
    mv = 0.5 * (ev[:-1] + ev[1:])
    hu = 0.5 * (eu[1] - eu[0])
    hv = 0.5 * (ev[1] - ev[0])
    un = (mu[:, None] + hu * GL_NODES[None, :]).ravel()
    vn = (mv[:, None] + hv * GL_NODES[None, :]).ravel()
    wu = np.tile(hu * GL_WEIGHTS, pu_)
    wv = np.tile(hv * GL_WEIGHTS, pv_)
    U, V = np.meshgrid(un, vn, indexing="ij")
    W = wu[:, None] * wv[None, :]
    uu, vv = U.ravel(), V.ravel()
    jac = np.linalg.norm(
        np.cross(np.asarray(surf.phi_u(uu, vv), dtype=float),
                 np.asarray(surf.phi_v(uu, vv), dtype=float)), axis=1)
    vals = np.asarray(density(uu, vv), dtype=float)
    total = float(np.sum(W.ravel() * vals * jac))
    if not np.isfinite(total):
        warnings.warn(f"integrate_surface('{surf.name}'): non-finite density",
                      RuntimeWarning, stacklevel=2)
    return total


# ---------------------------------------------------------------------------
# boundary data


def boundary_outward_normal(manifold, end: str, v=None):
    """Outward unit (co)normal on the boundary.

    Curves: end "a" -> -T(a), end "b" -> +T(b).  Surfaces: the u = a / u = b
    side circle, evaluated at v (scalar or array); the result is tangent to
    the surface, orthogonal to the boundary curve, pointing out of it.
    Raises NoBoundary on closed curves / u-closed surfaces.
    """
    if end not in ("a", "b"):
        raise ValueError("end must be 'a' or 'b'")
    if isinstance(manifold, ParamCurve):
        if manifold.closed:
            raise NoBoundary(f"curve '{manifold.name}' is closed")
        t = manifold.a if end == "a" else manifold.b
        d1 = np.asarray(manifold.dgamma(np.array([t])), dtype=float)[0]
        T = d1 / np.linalg.norm(d1)
        return -T if end == "a" else T
    if isinstance(manifold, ParamSurface):
        if manifold.u_closed:
            raise NoBoundary(f"surface '{manifold.name}' is closed in u")
        if v is None:
            raise ValueError("surface boundary normal needs the v parameter")
        vs, scalar = _as_params(v)
        u0 = manifold.a if end == "a" else manifold.b
        us = np.full_like(vs, u0)
        pv = np.asarray(manifold.phi_v(us, vs), dtype=float)
        N = surface_normal(manifold, us, vs)
        N = np.atleast_2d(N)
        nu = np.cross(pv, N) / np.linalg.norm(pv, axis=1)[:, None]
        if end == "a":
            nu = -nu
        return nu[0] if scalar else nu
    raise TypeError("expected ParamCurve or ParamSurface")


# ---------------------------------------------------------------------------
# nearest-point projection (shared by flow invariance checks and field
# restrictions)


def nearest_curve_param(curve: ParamCurve, pts: np.ndarray,
                        extend: float = 0.0,
                        seed_window: tuple[float, float] | None = None) -> np.ndarray:
    """Parameter of the point on the curve nearest to each ambient point.

    Coarse grid seeding plus Newton on (p - gamma(t)).gamma'(t) = 0.  With
    extend > 0 the search interval widens to [a - extend, b + extend] (the
    callables must remain valid there); closed curves wrap instead.
    seed_window = (t0, w) restricts seeding to [t0 - w, t0 + w]; only valid
    when every query point is known to project into that window.
    """
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    span = curve.b - curve.a
    if seed_window is not None:
        t0, w = seed_window
        seeds_t = np.linspace(t0 - w, t0 + w, 33)
        if curve.closed:
            seeds_t = curve.a + np.mod(seeds_t - curve.a, span)
        else:
            seeds_t = np.clip(seeds_t, curve.a - extend, curve.b + extend)
        seeds_p = np.asarray(curve.gamma(seeds_t), dtype=float)
    elif curve.closed or extend == 0.0:
        seeds_t = curve._grid_ts
        seeds_p = curve._grid_points
    else:
        seeds_t = np.linspace(curve.a - extend, curve.b + extend, 768)
        seeds_p = np.asarray(curve.gamma(seeds_t), dtype=float)
    # chunked |p - s|^2 argmin, avoiding an n x m x dim temporary
    s2 = (seeds_p ** 2).sum(axis=1)
    best = np.empty(len(pts), dtype=np.intp)
    for k0 in range(0, len(pts), 8192):
        chunk = pts[k0:k0 + 8192]
        d2 = s2[None, :] - 2.0 * (chunk @ seeds_p.T)
        best[k0:k0 + 8192] = d2.argmin(axis=1)
    t = seeds_t[best].copy()
    lo = curve.a - extend
    hi = curve.b + extend
    for _ in range(25):
        g = np.asarray(curve.gamma(t), dtype=float)
        dg = np.asarray(curve.dgamma(t), dtype=float)
        ddg = np.asarray(curve.ddgamma(t), dtype=float)
        r = pts - g
        f = np.einsum("ij,ij->i", r, dg)
        fp = np.einsum("ij,ij->i", r, ddg) - np.einsum("ij,ij->i", dg, dg)
        step = -f / np.where(np.abs(fp) > 1e-300, fp, 1.0)
        step = np.clip(step, -0.1 * span, 0.1 * span)
        t = t + step
        if curve.closed:
            t = curve.a + np.mod(t - curve.a, span)
        else:
            t = np.clip(t, lo, hi)
        if np.abs(step).max() < 1e-13 * span:
            break
    return t


def nearest_surface_param(surf: ParamSurface, pts: np.ndarray,
                          extend_u: float = 0.0,
                          seed_window: tuple[tuple[float, float],
                                             tuple[float, float]] | None = None,
                          ) -> tuple[np.ndarray, np.ndarray]:
    """(u, v) of the nearest surface point per ambient point (Gauss-Newton).

    seed_window = ((u0, v0), (wu, wv)) restricts seeding to the chart box
    around (u0, v0); only valid when every query point projects inside it.
    """
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    span_u = surf.b - surf.a
    span_v = surf.d - surf.c
    if seed_window is not None:
        (u0, v0), (wu, wv) = seed_window
        us = np.clip(np.linspace(u0 - wu, u0 + wu, 17),
                     surf.a - extend_u, surf.b + extend_u)
        vs = np.linspace(v0 - wv, v0 + wv, 17)
        if surf.periodic_v:
            vs = surf.c + np.mod(vs - surf.c, span_v)
        else:
            vs = np.clip(vs, surf.c, surf.d)
    else:
        # coarse enough to keep the distance matrix small for big batches;
        # Gauss-Newton below recovers the rest
        nu_, nv_ = 24, 24
        us = np.linspace(surf.a - extend_u, surf.b + extend_u, nu_)
        vs = np.linspace(surf.c, surf.d, nv_, endpoint=not surf.periodic_v)
    U, V = np.meshgrid(us, vs, indexing="ij")
    seeds = np.asarray(surf.phi(U.ravel(), V.ravel()), dtype=float)
    # chunked |p - s|^2 argmin, avoiding an n x m x 3 temporary
    s2 = (seeds ** 2).sum(axis=1)
    best = np.empty(len(pts), dtype=np.intp)
    for k0 in range(0, len(pts), 8192):
        chunk = pts[k0:k0 + 8192]
        d2 = s2[None, :] - 2.0 * (chunk @ seeds.T)
        best[k0:k0 + 8192] = d2.argmin(axis=1)
    u = U.ravel()[best].copy()
    v = V.ravel()[best].copy()
    lo_u, hi_u = surf.a - extend_u, surf.b + extend_u
    for _ in range(25):
        p = np.asarray(surf.phi(u, v), dtype=float)
        pu = np.asarray(surf.phi_u(u, v), dtype=float)
        pv = np.asarray(surf.phi_v(u, v), dtype=float)
        r = pts - p
        g1 = np.einsum("ij,ij->i", r, pu)
        g2 = np.einsum("ij,ij->i", r, pv)
        E = np.einsum("ij,ij->i", pu, pu)
        F = np.einsum("ij,ij->i", pu, pv)
        G = np.einsum("ij,ij->i", pv, pv)
        det = np.maximum(E * G - F * F, 1e-300)
        du = (G * g1 - F * g2) / det
        dv = (E * g2 - F * g1) / det
        du = np.clip(du, -0.1 * span_u, 0.1 * span_u)
        dv = np.clip(dv, -0.1 * span_v, 0.1 * span_v)
        u = np.clip(u + du, lo_u, hi_u)
        v = v + dv
        if surf.periodic_v:
            v = surf.c + np.mod(v - surf.c, span_v)
        else:
            v = np.clip(v, surf.c, surf.d)
        if max(np.abs(du).max(), np.abs(dv).max()) < 1e-13 * max(span_u, span_v):
            break
    return u, v


def distance_to_manifold(manifold, pts: np.ndarray) -> np.ndarray:
    """Euclidean distance from ambient points to the manifold."""
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    if isinstance(manifold, ParamCurve):
        t = nearest_curve_param(manifold, pts)
        return np.linalg.norm(pts - np.asarray(manifold.gamma(t), dtype=float), axis=1)
    u, v = nearest_surface_param(manifold, pts)
    return np.linalg.norm(pts - np.asarray(manifold.phi(u, v), dtype=float), axis=1)
