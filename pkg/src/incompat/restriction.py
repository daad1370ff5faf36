"""Compatibility decisions restricted to plane and line sections.

A pair restricted to a section may be replaced by any shifted pair that
agrees with it on every state of the section; the shifted observables
trade bias against a Bloch-vector component along the section normals.
The pair is section-compatible exactly when some feasible shift makes
the shifted pair compatible, i.e. when the minimum of F over shifts is
<= 0.  Through-origin plane sections admit a closed form for unbiased
pairs (the projection criterion), used as the fast path and as an
independent cross-check of the solver.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from . import _kernels
from .bloch import Vec3, ObservablePair, QubitObservable
from .errors import InfeasibleError, OutOfRangeError, SolverFailureError
from .jointness import TOL_F
from .optimizer import OptimizerConfig
from .statesets import StateSetLine, StateSetPlane, StateSetR

#: Minimum projection-criterion excess for claiming a section detects
#: incompatibility (witness claims need daylight above roundoff).
WITNESS_TOL = 1e-7


@dataclass(frozen=True)
class RestrictionParams:
    lambda1: float
    lambda2: float
    xi1: Optional[float] = None
    xi2: Optional[float] = None

    def as_tuple(self) -> tuple[float, ...]:
        if self.xi1 is None:
            return (self.lambda1, self.lambda2)
        return (self.lambda1, self.lambda2, self.xi1, self.xi2)


@dataclass(frozen=True)
class S0Verdict:
    compatible: bool
    min_F: float
    argmin: RestrictionParams
    certificate_quality: float  # feasibility violation at the argmin

    def __post_init__(self):
        assert self.compatible == (self.min_F <= TOL_F)


def tilde_observable(o: QubitObservable, s: StateSetPlane, lam: float) -> QubitObservable:
    """Shifted observable agreeing with o on every state of the plane
    section: bias -> bias - lam*r, bloch -> bloch + lam*n."""
    try:
        return QubitObservable(o.bias - lam * s.r, o.bloch + s.n.scale(lam))
    except OutOfRangeError as exc:
        raise InfeasibleError(f"shift lam = {lam!r} violates positivity: {exc}") from exc


def tilde_observable_line(
    o: QubitObservable, s: StateSetLine, lam: float, xi: float
) -> QubitObservable:
    """Line-section counterpart with the extra shift xi along the plane
    normal m."""
    try:
        return QubitObservable(
            o.bias - lam * s.r, o.bloch + s.n.scale(lam) + s.m.scale(xi)
        )
    except OutOfRangeError as exc:
        raise InfeasibleError(
            f"shift (lam, xi) = ({lam!r}, {xi!r}) violates positivity: {exc}"
        ) from exc


def _degenerate_verdict(kind_line: bool) -> S0Verdict:
    # a single-state section never detects incompatibility
    params = RestrictionParams(0.0, 0.0, 0.0, 0.0) if kind_line else RestrictionParams(0.0, 0.0)
    return S0Verdict(True, -1.0, params, 0.0)


def s0_compatible_plane(
    p: ObservablePair, s: StateSetPlane, opt: OptimizerConfig | None = None
) -> S0Verdict:
    """Minimize F over feasible plane shifts (lam1, lam2)."""
    if s.degenerate:
        return _degenerate_verdict(kind_line=False)
    opt = opt or OptimizerConfig()
    a1, a2 = p.first, p.second
    value, l1, l2, viol, _steps = _kernels.min_f_plane(
        a1.bias, a1.bloch.x, a1.bloch.y, a1.bloch.z,
        a2.bias, a2.bloch.x, a2.bloch.y, a2.bloch.z,
        s.r, s.n.x, s.n.y, s.n.z,
        opt.starts, opt.penalty_weight, opt.tol, opt.max_iter, opt.seed,
    )
    if viol > 1e-7:
        raise SolverFailureError(
            f"solver left the feasible region (violation {viol!r})"
        )
    return S0Verdict(value <= TOL_F, value, RestrictionParams(l1, l2), viol)


def s0_compatible_line(
    p: ObservablePair, s: StateSetLine, opt: OptimizerConfig | None = None
) -> S0Verdict:
    """Minimize F over feasible line shifts (lam1, lam2, xi1, xi2)."""
    if s.degenerate:
        return _degenerate_verdict(kind_line=True)
    opt = opt or OptimizerConfig()
    a1, a2 = p.first, p.second
    value, l1, l2, x1, x2, viol, _steps = _kernels.min_f_line(
        a1.bias, a1.bloch.x, a1.bloch.y, a1.bloch.z,
        a2.bias, a2.bloch.x, a2.bloch.y, a2.bloch.z,
        s.r, s.n.x, s.n.y, s.n.z, s.m.x, s.m.y, s.m.z,
        opt.starts, opt.penalty_weight, opt.tol, opt.max_iter, opt.seed,
    )
    if viol > 1e-7:
        raise SolverFailureError(
            f"solver left the feasible region (violation {viol!r})"
        )
    return S0Verdict(value <= TOL_F, value, RestrictionParams(l1, l2, x1, x2), viol)


def s0_compatible(
    p: ObservablePair, s: StateSetPlane | StateSetLine, opt: OptimizerConfig | None = None
) -> S0Verdict:
    if isinstance(s, StateSetLine):
        return s0_compatible_line(p, s, opt)
    return s0_compatible_plane(p, s, opt)


def s0R_slack(a1: Vec3, a2: Vec3, s: StateSetR) -> float:
    """Projection-criterion slack; <= 0 iff the unbiased pair is
    compatible on the through-origin section."""
    return _kernels.proj_slack(
        a1.x, a1.y, a1.z, a2.x, a2.y, a2.z, s.n.x, s.n.y, s.n.z
    )


def s0R_compatible_unbiased(a1: Vec3, a2: Vec3, s: StateSetR) -> bool:
    """Closed-form section compatibility for unbiased pairs:
    |P(a1+a2)| + |P(a1-a2)| <= 2 with P the projection onto the section."""
    if a1.norm() > 1.0 + 1e-12 or a2.norm() > 1.0 + 1e-12:
        raise OutOfRangeError("unbiased Bloch vectors must have norm <= 1")
    return s0R_slack(a1, a2, s) <= 1e-12
