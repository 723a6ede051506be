"""One-sided finite-difference oracle for shape derivatives.

The derivative of J at M along X is the one-sided limit of
q(t) = (J(Phi_t(M)) - J(M)) / t as t decreases to 0.  The oracle evaluates
q on a halving schedule t_i = t0 / 2^i and extrapolates with the Richardson
triangle

    R[i][0] = q(t_i),   R[i][j] = R[i][j-1] + (R[i][j-1] - R[i-1][j-1]) / (2^j - 1),

which removes the t, t^2, ... terms of a smooth q.  The baseline J(M) is
evaluated through the t = 0 flow (an exact identity) so that any systematic
discretization inside the flowed-manifold representation is shared by every
term of the quotient and cancels.

Entirely independent of the closed-form derivatives in `functionals`: only
J.evaluate and the flow are used.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import InvariantViolation, NoConvergence, NonFinite
from .fields import AmbientField
from .flow import DEFAULT_MAX_STEP, FlowConfig, flow_manifold

REL_TOL = 1e-5
ABS_TOL = 1e-8


@dataclass(frozen=True)
class FDConfig:
    """Halving schedule t_i = t0/2^i, i = 0..levels-1.

    flow_cfg, when given, only contributes its step size |t_final|/n_steps,
    which caps the RK4 step of every flow in the schedule (default 0.01).
    """

    t0: float = 1e-2
    levels: int = 5
    richardson: bool = True
    flow_cfg: Optional[FlowConfig] = None

    def __post_init__(self):
        if not self.t0 > 0:
            raise InvariantViolation("t0 must be positive")
        if self.levels < 2:
            raise InvariantViolation("need at least 2 levels")

    @property
    def max_step(self) -> float:
        if self.flow_cfg is None or self.flow_cfg.t_final == 0.0:
            return DEFAULT_MAX_STEP
        return abs(self.flow_cfg.t_final) / self.flow_cfg.n_steps


@dataclass(frozen=True)
class FDTrace:
    """Quotient series and extrapolation diagonal for one derivative."""

    ts: np.ndarray
    quotients: np.ndarray
    extrapolants: np.ndarray
    value: float
    error_estimate: float


def _flow_at(field: AmbientField, manifold, t: float, max_step: float):
    n = max(1, math.ceil(abs(t) / max_step)) if t != 0.0 else 1
    return flow_manifold(field, manifold, FlowConfig(t_final=t, n_steps=n))


def fd_quotients(J, M, X: AmbientField, cfg: FDConfig | None = None) -> FDTrace:
    """Difference quotients plus Richardson diagonal for dJ(M)(X)."""
    if cfg is None:
        cfg = FDConfig()
    ts = cfg.t0 / 2.0 ** np.arange(cfg.levels)
    J0 = float(J.evaluate(_flow_at(X, M, 0.0, cfg.max_step)))
    if not np.isfinite(J0):
        raise NonFinite(f"functional '{J.name}' is not finite on the base manifold")
    q = np.empty(cfg.levels)
    for i, t in enumerate(ts):
        Jt = float(J.evaluate(_flow_at(X, M, float(t), cfg.max_step)))
        if not np.isfinite(Jt):
            raise NonFinite(f"functional '{J.name}' not finite at flow time {t:g}")
        q[i] = (Jt - J0) / t

    if cfg.richardson:
        row = q.copy()
        diag = [q[0]]
        for i in range(1, cfg.levels):
            new = np.empty(i + 1)
            new[0] = q[i]
            for j in range(1, i + 1):
                new[j] = new[j - 1] + (new[j - 1] - row[j - 1]) / (2.0**j - 1.0)
            row[: i + 1] = new
            diag.append(new[i])
        extr = np.asarray(diag)
    else:
        extr = q.copy()

    value = float(extr[-1])
    diffs = np.abs(np.diff(extr))
    # quotient roundoff is ~eps*|J|/t and Richardson amplifies it; keep the
    # estimate honest when the diagonal bottoms out at that noise level
    floor = 64.0 * np.finfo(float).eps * (1.0 + abs(J0) + abs(value)) / ts[-1]
    err = float(max(diffs[-1] if diffs.size else 0.0, floor))

    if diffs.size >= 3:
        tail = diffs[-3:]
        if (tail[0] < tail[1] < tail[2]
                and tail[2] > 1e-6 * (1.0 + abs(value))):
            raise NoConvergence(
                f"extrapolants for '{J.name}' diverge: last differences "
                f"{tail[0]:.3e}, {tail[1]:.3e}, {tail[2]:.3e}"
            )
    return FDTrace(ts=ts, quotients=q, extrapolants=extr, value=value,
                   error_estimate=err)


def eulerian_fd(J, M, X: AmbientField,
                cfg: FDConfig | None = None) -> tuple[float, float]:
    """(derivative value, error estimate) by extrapolated one-sided FD."""
    tr = fd_quotients(J, M, X, cfg)
    return tr.value, tr.error_estimate


@dataclass(frozen=True)
class DerivativeReport:
    """Side-by-side FD vs closed-form derivative, with verdict.

    rel_diff = abs_diff / max(|analytic|, |fd|); verdict is "pass" iff
    rel_diff <= rel_tol or abs_diff <= abs_tol.
    """

    functional: str
    manifold: str
    field: str
    fd_value: float
    fd_error_estimate: float
    analytic_value: float
    abs_diff: float
    rel_diff: float
    verdict: str
    trace: Optional[FDTrace] = None

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"


def compare(J, M, X: AmbientField, cfg: FDConfig | None = None,
            rel_tol: float = REL_TOL, abs_tol: float = ABS_TOL) -> DerivativeReport:
    """Run the FD oracle against J.analytic_derivative and record the verdict."""
    if J.analytic_derivative is None:
        raise InvariantViolation(f"functional '{J.name}' has no closed form")
    tr = fd_quotients(J, M, X, cfg)
    analytic = float(J.analytic_derivative(M, X))
    abs_diff = abs(analytic - tr.value)
    denom = max(abs(analytic), abs(tr.value))
    rel_diff = abs_diff / denom if denom > 0.0 else 0.0
    verdict = "pass" if (rel_diff <= rel_tol or abs_diff <= abs_tol) else "fail"
    return DerivativeReport(
        functional=J.name, manifold=M.name, field=X.name,
        fd_value=tr.value, fd_error_estimate=tr.error_estimate,
        analytic_value=analytic, abs_diff=abs_diff, rel_diff=rel_diff,
        verdict=verdict, trace=tr,
    )
