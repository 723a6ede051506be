"""Ambient vector fields and their decomposition along a manifold.

An AmbientField is a compactly supported C^k field on the hold-all domain,
given by vectorized callables X: (n, d) -> (n, d) and dX: (n, d) -> (n, d, d).
split_field decomposes the restriction X|_M into

    X = X_perp + X_tan + X_nu

with X_perp normal to the tangent space, X_nu the boundary-normal part
(carried by a smooth extension of the outward boundary normal, cut off away
from the boundary) and X_tan the tangential remainder, which lies in the
tangent space of the boundary at boundary points.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import InvariantViolation, SupportViolation
from .geometry import (
    ParamCurve,
    ParamSurface,
    boundary_outward_normal,
    curvature,
    curve_frame,
    nearest_curve_param,
    nearest_surface_param,
    surface_mean_curvature,
    surface_normal,
)

_CHECK_RNG_SEED = 4243


# ---------------------------------------------------------------------------
# smooth cutoffs


def bump_profile(s) -> np.ndarray:
    """Radial bump beta(s) = exp(1 - 1/(1 - s^2)) on [0, 1), zero beyond.

    beta(0) = 1 and all derivatives vanish at s = 1.
    """
    s = np.abs(np.asarray(s, dtype=float))
    out = np.zeros_like(s)
    m = s < 1.0 - 1e-12
    sm = s[m]
    out[m] = np.exp(1.0 - 1.0 / (1.0 - sm * sm))
    return out


def bump_profile_deriv(s) -> np.ndarray:
    """d beta/d s (for |s|, caller handles the chain rule)."""
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    m = np.abs(s) < 1.0 - 1e-12
    sm = s[m]
    q = 1.0 - sm * sm
    out[m] = np.exp(1.0 - 1.0 / q) * (-2.0 * sm / (q * q))
    return out


def _f_exp(u: np.ndarray) -> np.ndarray:
    out = np.zeros_like(u)
    m = u > 1e-12
    out[m] = np.exp(-1.0 / u[m])
    return out


def _f_exp_deriv(u: np.ndarray) -> np.ndarray:
    out = np.zeros_like(u)
    m = u > 1e-12
    out[m] = np.exp(-1.0 / u[m]) / (u[m] * u[m])
    return out


def smooth_step(s) -> np.ndarray:
    """C^infinity transition: 1 for s <= 0, 0 for s >= 1, monotone between."""
    s = np.asarray(s, dtype=float)
    sc = np.clip(s, 0.0, 1.0)
    fa = _f_exp(1.0 - sc)
    fb = _f_exp(sc)
    return fa / (fa + fb + 1e-300)


def smooth_step_deriv(s) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    m = (s > 1e-12) & (s < 1.0 - 1e-12)
    sm = s[m]
    fa, fb = _f_exp(1.0 - sm), _f_exp(sm)
    dfa, dfb = -_f_exp_deriv(1.0 - sm), _f_exp_deriv(sm)
    den = fa + fb
    out[m] = (dfa * fb - fa * dfb) / (den * den)
    return out


# ---------------------------------------------------------------------------
# supports and the hold-all


@dataclass(frozen=True)
class Ball:
    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))

    def contains_ball(self, center, radius) -> bool:
        c = np.asarray(center, dtype=float)
        return np.linalg.norm(c - self.center) + radius <= self.radius

    def exterior_points(self, n: int, rng: np.random.Generator) -> np.ndarray:
        d = len(self.center)
        dirs = rng.normal(size=(n, d))
        dirs /= np.linalg.norm(dirs, axis=1)[:, None]
        radii = self.radius * (1.0 + 0.05 + rng.uniform(0, 1, n))
        return self.center + dirs * radii[:, None]

    def interior_points(self, n: int, rng: np.random.Generator) -> np.ndarray:
        d = len(self.center)
        dirs = rng.normal(size=(n, d))
        dirs /= np.linalg.norm(dirs, axis=1)[:, None]
        radii = self.radius * rng.uniform(0, 1, n) ** (1.0 / d)
        return self.center + dirs * radii[:, None]


def default_holdall(dim: int) -> Ball:
    """Hold-all domain: ball of radius 16 about the origin."""
    return Ball(np.zeros(dim), 16.0)


# ---------------------------------------------------------------------------
# fields


@dataclass(frozen=True)
class AmbientField:
    """Compactly supported ambient field with analytic or FD Jacobian.

    Construction samples 64 points outside `support` (X and dX must vanish
    there) and checks dX against central differences of X at 32 interior
    points to relative 1e-6.

    `scale`, when set, is the characteristic width of the field's spatial
    variation (a bump's radius); consumers that stencil through the field
    use it to keep truncation under control.
    """

    dim: int
    X: Callable[[np.ndarray], np.ndarray]
    dX: Callable[[np.ndarray], np.ndarray]
    support: Ball
    name: str = "field"
    scale: float | None = None

    def __post_init__(self):
        if self.scale is not None and not self.scale > 0.0:
            raise InvariantViolation(
                f"field '{self.name}': scale must be positive, got {self.scale!r}"
            )
        rng = np.random.default_rng(_CHECK_RNG_SEED)
        out = self.support.exterior_points(64, rng)
        Xo = np.asarray(self.X(out), dtype=float)
        dXo = np.asarray(self.dX(out), dtype=float)
        if np.abs(Xo).max() > 1e-13 or np.abs(dXo).max() > 1e-13:
            raise InvariantViolation(
                f"field '{self.name}': does not vanish outside its support"
            )
        pts = self.support.interior_points(32, rng)
        got = np.asarray(self.dX(pts), dtype=float)
        h = 1e-6 * (1.0 + self.support.radius)
        fd = np.empty_like(got)
        for j in range(self.dim):
            e = np.zeros(self.dim)
            e[j] = h
            fd[:, :, j] = (np.asarray(self.X(pts + e)) - np.asarray(self.X(pts - e))) / (2 * h)
        rel = np.abs(fd - got).max(axis=(1, 2)) / (1.0 + np.abs(got).max(axis=(1, 2)))
        if rel.max() > 1e-6:
            raise InvariantViolation(
                f"field '{self.name}': dX disagrees with finite differences "
                f"(rel {rel.max():.2e})"
            )


def fd_jacobian(X: Callable[[np.ndarray], np.ndarray], dim: int,
                h: float) -> Callable[[np.ndarray], np.ndarray]:
    """Central-difference Jacobian of a vectorized field callable."""

    def dX(pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        out = np.empty((len(pts), dim, dim))
        for j in range(dim):
            e = np.zeros(dim)
            e[j] = h
            out[:, :, j] = (np.asarray(X(pts + e)) - np.asarray(X(pts - e))) / (2 * h)
        return out

    return dX


def bump_field(center, radius: float, direction, dim: int | None = None,
               holdall: Ball | None = None, name: str = "bump") -> AmbientField:
    """Smooth bump supported in the ball B(center, radius).

    X(p) = beta(|p - center| / radius) * direction(p); `direction` is a
    constant vector or a vectorized callable.  Raises SupportViolation if
    the ball is not contained in the hold-all.
    """
    center = np.asarray(center, dtype=float)
    if dim is None:
        dim = len(center)
    if holdall is None:
        holdall = default_holdall(dim)
    if not holdall.contains_ball(center, radius):
        raise SupportViolation(
            f"bump at {center.tolist()} radius {radius:g} escapes the hold-all"
        )
    const_dir = not callable(direction)
    if const_dir:
        dvec = np.asarray(direction, dtype=float)

    def X(pts: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        s = np.linalg.norm(pts - center, axis=1) / radius
        beta = bump_profile(s)
        if const_dir:
            return beta[:, None] * dvec[None, :]
        # callable directions (e.g. nearest-point pullbacks) are only
        # meaningful, and only needed, where the bump is alive
        out = np.zeros_like(pts)
        m = beta > 0.0
        if np.any(m):
            out[m] = beta[m, None] * np.asarray(direction(pts[m]), dtype=float)
        return out

    if const_dir:
        def dX(pts: np.ndarray) -> np.ndarray:
            pts = np.atleast_2d(np.asarray(pts, dtype=float))
            r = pts - center
            dist = np.linalg.norm(r, axis=1)
            s = dist / radius
            grad_s = np.zeros_like(pts)
            m = dist > 1e-300
            grad_s[m] = r[m] / (dist[m, None] * radius)
            dbeta = bump_profile_deriv(s)
            return dvec[None, :, None] * (dbeta[:, None] * grad_s)[:, None, :]
    else:
        dX = fd_jacobian(X, dim, 1e-7 * (1.0 + radius))

    return AmbientField(dim=dim, X=X, dX=dX,
                        support=Ball(center, radius), name=name, scale=radius)


def sum_field(fields: Sequence[AmbientField], name: str = "sum") -> AmbientField:
    """Pointwise sum; support is the smallest ball containing all supports."""
    if not fields:
        raise ValueError("sum_field needs at least one field")
    dim = fields[0].dim
    if any(f.dim != dim for f in fields):
        raise InvariantViolation("sum_field: mixed dimensions")
    centers = np.array([f.support.center for f in fields])
    mid = centers.mean(axis=0)
    rad = max(np.linalg.norm(f.support.center - mid) + f.support.radius
              for f in fields)

    def X(pts):
        return sum(np.asarray(f.X(pts), dtype=float) for f in fields)

    def dX(pts):
        return sum(np.asarray(f.dX(pts), dtype=float) for f in fields)

    scales = [f.scale for f in fields if f.scale is not None]
    return AmbientField(dim=dim, X=X, dX=dX, support=Ball(mid, rad), name=name,
                        scale=min(scales) if scales else None)


# ---------------------------------------------------------------------------
# projections and splitting


def _tangent_basis_surface(surf: ParamSurface, us, vs):
    """Orthonormal tangent basis (e1, e2) from Gram-Schmidt on phi_u, phi_v."""
    pu = np.asarray(surf.phi_u(us, vs), dtype=float)
    pv = np.asarray(surf.phi_v(us, vs), dtype=float)
    e1 = pu / np.linalg.norm(pu, axis=1)[:, None]
    w = pv - e1 * np.einsum("ij,ij->i", pv, e1)[:, None]
    e2 = w / np.linalg.norm(w, axis=1)[:, None]
    return e1, e2


def project_normal(manifold, param, vec) -> np.ndarray:
    """Component of `vec` orthogonal to the tangent space at `param`.

    param: scalar t (curve) or pair (u, v) (surface); vec: (d,) or (n, d).
    Idempotent and self-adjoint by construction.
    """
    vec = np.asarray(vec, dtype=float)
    scalar = vec.ndim == 1
    V = np.atleast_2d(vec)
    if isinstance(manifold, ParamCurve):
        fr = curve_frame(manifold, param)
        T = np.atleast_2d(fr.T)
        out = V - T * np.einsum("ij,ij->i", V, T)[:, None]
    elif isinstance(manifold, ParamSurface):
        u, v = param
        us = np.atleast_1d(np.asarray(u, dtype=float))
        vs = np.atleast_1d(np.asarray(v, dtype=float))
        us, vs = np.broadcast_arrays(us, vs)
        e1, e2 = _tangent_basis_surface(manifold, us, vs)
        out = (V - e1 * np.einsum("ij,ij->i", V, e1)[:, None]
                 - e2 * np.einsum("ij,ij->i", V, e2)[:, None])
    else:
        raise TypeError("expected ParamCurve or ParamSurface")
    return out[0] if scalar else out


def _curve_conormal_extension(curve: ParamCurve, ts: np.ndarray) -> np.ndarray:
    """Smooth tangent field equal to the outward conormal at each end; zero
    if closed.  A polynomial ramp keeps the profile analytic, so fixed-panel
    quadrature of anything built on it converges spectrally."""
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    if curve.closed:
        return np.zeros((len(ts), curve.dim))
    span = curve.b - curve.a
    T = np.atleast_2d(curve_frame(curve, ts).T)
    w_b = ((ts - curve.a) / span) ** 4
    w_a = ((curve.b - ts) / span) ** 4
    return (w_b - w_a)[:, None] * T


def _surface_conormal_extension(surf: ParamSurface, us: np.ndarray,
                                vs: np.ndarray) -> np.ndarray:
    """Surface analogue: outward conormal at the u-sides, polynomial ramp
    in between."""
    us = np.atleast_1d(np.asarray(us, dtype=float))
    vs = np.atleast_1d(np.asarray(vs, dtype=float))
    if surf.u_closed:
        return np.zeros((len(us), 3))
    if not surf.periodic_v:
        raise InvariantViolation(
            f"surface '{surf.name}': boundary-normal extension needs a "
            "v-periodic (cylinder-like) surface"
        )
    span = surf.b - surf.a
    pv = np.asarray(surf.phi_v(us, vs), dtype=float)
    N = np.atleast_2d(surface_normal(surf, us, vs))
    nu = np.cross(pv, N) / np.linalg.norm(pv, axis=1)[:, None]
    w_b = ((us - surf.a) / span) ** 4
    w_a = ((surf.b - us) / span) ** 4
    return (w_b - w_a)[:, None] * nu


@dataclass(frozen=True)
class FieldSplit:
    """Sampled decomposition X = x_perp + x_tan + x_nu along a manifold.

    params: (n,) curve parameters or (n, 2) surface parameters; points and
    the component arrays are (n, d); boundary_mask marks samples on the
    manifold boundary.
    """

    params: np.ndarray
    points: np.ndarray
    x: np.ndarray
    x_perp: np.ndarray
    x_tan: np.ndarray
    x_nu: np.ndarray
    boundary_mask: np.ndarray

    @property
    def samples(self):
        """Iterate (parameter, p, X_p, Xperp_p, Xtan_p, Xnu_p) tuples."""
        for i in range(len(self.points)):
            yield (self.params[i], self.points[i], self.x[i],
                   self.x_perp[i], self.x_tan[i], self.x_nu[i])


def _sample_params(manifold, n_samples: int):
    if isinstance(manifold, ParamCurve):
        return np.linspace(manifold.a, manifold.b, n_samples)
    k = max(2, int(np.ceil(np.sqrt(n_samples))))
    us = np.linspace(manifold.a, manifold.b, k)
    vs = np.linspace(manifold.c, manifold.d, k, endpoint=not manifold.periodic_v)
    U, V = np.meshgrid(us, vs, indexing="ij")
    return U.ravel(), V.ravel()


def split_field(manifold, field: AmbientField, n_samples: int = 64) -> FieldSplit:
    """Decompose the restriction of `field` at sampled parameters."""
    if isinstance(manifold, ParamCurve):
        ts = _sample_params(manifold, n_samples)
        pts = np.asarray(manifold.gamma(ts), dtype=float)
        x = np.asarray(field.X(pts), dtype=float)
        x_perp = project_normal(manifold, ts, x)
        nu = _curve_conormal_extension(manifold, ts)
        params = ts
        if manifold.closed:
            bmask = np.zeros(len(ts), dtype=bool)
        else:
            bmask = (ts == manifold.a) | (ts == manifold.b)
    else:
        us, vs = _sample_params(manifold, n_samples)
        pts = np.asarray(manifold.phi(us, vs), dtype=float)
        x = np.asarray(field.X(pts), dtype=float)
        x_perp = project_normal(manifold, (us, vs), x)
        nu = _surface_conormal_extension(manifold, us, vs)
        params = np.stack([us, vs], axis=-1)
        if manifold.u_closed:
            bmask = np.zeros(len(us), dtype=bool)
        else:
            bmask = (us == manifold.a) | (us == manifold.b)
    x_nu = np.einsum("ij,ij->i", x, nu)[:, None] * nu
    x_tan = x - x_perp - x_nu
    return FieldSplit(params=params, points=pts, x=x, x_perp=x_perp,
                      x_tan=x_tan, x_nu=x_nu, boundary_mask=bmask)


@dataclass(frozen=True)
class TangencyReport:
    max_normal_residual: float
    max_boundary_residual: float


def check_tangency(manifold, field: AmbientField,
                   n_samples: int = 200) -> TangencyReport:
    """Max |X_perp| over samples and max |X . nu| over boundary samples."""
    split = split_field(manifold, field, n_samples=n_samples)
    normal_res = float(np.linalg.norm(split.x_perp, axis=1).max())
    bmask = split.boundary_mask
    if not bmask.any():
        return TangencyReport(normal_res, 0.0)
    if isinstance(manifold, ParamCurve):
        res = 0.0
        for end in ("a", "b"):
            t_end = manifold.a if end == "a" else manifold.b
            nu = boundary_outward_normal(manifold, end)
            xe = np.asarray(field.X(np.asarray(manifold.gamma(np.array([t_end])),
                                               dtype=float)), dtype=float)[0]
            res = max(res, abs(float(xe @ nu)))
        return TangencyReport(normal_res, res)
    res = 0.0
    for end in ("a", "b"):
        u0 = manifold.a if end == "a" else manifold.b
        vs = np.unique(split.params[bmask][:, 1])
        nu = np.atleast_2d(boundary_outward_normal(manifold, end, vs))
        pts = np.asarray(manifold.phi(np.full_like(vs, u0), vs), dtype=float)
        xe = np.asarray(field.X(pts), dtype=float)
        res = max(res, float(np.abs(np.einsum("ij,ij->i", xe, nu)).max()))
    return TangencyReport(normal_res, res)


# ---------------------------------------------------------------------------
# ambient realizations of split components


def _component_on_params(manifold, field: AmbientField, which: str):
    """Return V(params) evaluating one split component, valid slightly
    beyond the parameter domain (frames extend through the callables)."""
    if isinstance(manifold, ParamCurve):
        def V(ts):
            ts = np.atleast_1d(np.asarray(ts, dtype=float))
            d1 = np.asarray(manifold.dgamma(ts), dtype=float)
            T = d1 / np.linalg.norm(d1, axis=1)[:, None]
            pts = np.asarray(manifold.gamma(ts), dtype=float)
            x = np.asarray(field.X(pts), dtype=float)
            x_perp = x - T * np.einsum("ij,ij->i", x, T)[:, None]
            if which == "perp":
                return x_perp
            nu = _curve_conormal_extension(manifold, ts)
            x_nu = np.einsum("ij,ij->i", x, nu)[:, None] * nu
            if which == "nu":
                return x_nu
            return x - x_perp - x_nu
        return V

    def V(params):
        us, vs = params
        us = np.atleast_1d(np.asarray(us, dtype=float))
        vs = np.atleast_1d(np.asarray(vs, dtype=float))
        pts = np.asarray(manifold.phi(us, vs), dtype=float)
        x = np.asarray(field.X(pts), dtype=float)
        e1, e2 = _tangent_basis_surface(manifold, us, vs)
        x_perp = (x - e1 * np.einsum("ij,ij->i", x, e1)[:, None]
                    - e2 * np.einsum("ij,ij->i", x, e2)[:, None])
        if which == "perp":
            return x_perp
        nu = _surface_conormal_extension(manifold, us, vs)
        x_nu = np.einsum("ij,ij->i", x, nu)[:, None] * nu
        if which == "nu":
            return x_nu
        return x - x_perp - x_nu
    return V


def restriction_field(manifold, field: AmbientField, component: str,
                      tube_radius: float | None = None) -> AmbientField:
    """Ambient field restricting to one split component on the manifold.

    Values are pulled back through the nearest-point projection onto the
    manifold (parameter domain extended slightly past open ends so the
    projection stays smooth there) and cut off with a C^infinity profile in
    the distance to the manifold.  component: "perp" | "tan" | "nu".
    """
    if component not in ("perp", "tan", "nu"):
        raise ValueError("component must be 'perp', 'tan' or 'nu'")
    if tube_radius is None:
        # stay well inside the focal radius: past it the nearest-point
        # projection goes multivalued and the pullback loses smoothness
        if isinstance(manifold, ParamCurve):
            kmax = float(np.abs(curvature(manifold, manifold._grid_ts)).max())
        else:
            gu = np.linspace(manifold.a, manifold.b, 24)
            gv = np.linspace(manifold.c, manifold.d, 24)
            GU, GV = np.meshgrid(gu, gv, indexing="ij")
            kmax = float(np.abs(
                surface_mean_curvature(manifold, GU.ravel(), GV.ravel())).max())
        reach = 0.5 / kmax if kmax > 1e-12 else np.inf
        tube_radius = min(0.1 * manifold.diameter, 0.4 * reach)
    V = _component_on_params(manifold, field, component)
    is_curve = isinstance(manifold, ParamCurve)
    extend = 0.0 if (is_curve and manifold.closed) else 0.15 * (manifold.b - manifold.a)

    # support: ball spanning the manifold plus the tube
    if is_curve:
        samples = manifold._grid_points
    else:
        us = np.linspace(manifold.a, manifold.b, 24)
        vs = np.linspace(manifold.c, manifold.d, 24)
        U, Vg = np.meshgrid(us, vs, indexing="ij")
        samples = np.asarray(manifold.phi(U.ravel(), Vg.ravel()), dtype=float)
    mid = samples.mean(axis=0)
    rad = np.linalg.norm(samples - mid, axis=1).max() + tube_radius + 0.5 * extend

    if is_curve:
        def inner(pts):
            t = nearest_curve_param(manifold, pts, extend=extend)
            q = np.asarray(manifold.gamma(t), dtype=float)
            dist = np.linalg.norm(pts - q, axis=1)
            chi = smooth_step(dist / tube_radius)
            return chi[:, None] * V(t)
    else:
        def inner(pts):
            u, v = nearest_surface_param(manifold, pts, extend_u=extend)
            q = np.asarray(manifold.phi(u, v), dtype=float)
            dist = np.linalg.norm(pts - q, axis=1)
            chi = smooth_step(dist / tube_radius)
            return chi[:, None] * V((u, v))

    def X(pts):
        # projection is only needed inside the support ball; everything
        # outside is zero by construction
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        out = np.zeros_like(pts)
        m = np.linalg.norm(pts - mid, axis=1) <= rad
        if np.any(m):
            out[m] = inner(pts[m])
        return out
    dim = manifold.dim if is_curve else 3
    return AmbientField(
        dim=dim, X=X,
        dX=fd_jacobian(X, dim, 1e-6 * (1.0 + manifold.diameter)),
        support=Ball(mid, rad),
        name=f"{field.name}|{component}",
    )
