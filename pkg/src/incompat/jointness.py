"""Full-state-space compatibility of binary qubit observable pairs.

The decision functional F is the min-of-three-terms criterion: the pair
is compatible exactly when F <= 0.  Collinear Bloch vectors make the
criterion's denominator vanish; such pairs have commuting effects and
are reported compatible via a sentinel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import _kernels
from .bloch import Vec3, ZERO, ObservablePair, QubitObservable, make_unbiased
from .errors import IncompatibleError, OutOfRangeError

#: Verdict tolerance: F <= TOL_F counts as compatible (the criterion is a
#: closed condition on the compatible side).
TOL_F = 1e-9

#: Cross-product norm below which the pair is treated as collinear.
PARALLEL_EPS = 1e-10

#: Boundary band for reporting near-threshold verdicts.
BOUNDARY_BAND = 1e-7


@dataclass(frozen=True)
class BuschDiagnostics:
    """Intermediate quantities of the compatibility criterion."""

    gamma: float
    alpha: float
    beta: float
    g: Vec3
    F: float
    degenerate_parallel: bool

    @property
    def boundary(self) -> bool:
        return abs(self.F) <= BOUNDARY_BAND and not self.degenerate_parallel


@dataclass(frozen=True)
class JointObservable4:
    """Four-outcome joint observable; effects indexed by (mu, nu) in
    {+1, -1}^2 and stored as (scalar, vector) with E = (s*I + v.sigma)/2."""

    effects: tuple[tuple[float, Vec3], ...]

    _ORDER = ((1, 1), (1, -1), (-1, 1), (-1, -1))

    def effect(self, mu: int, nu: int) -> tuple[float, Vec3]:
        return self.effects[self._ORDER.index((mu, nu))]

    def outcome_labels(self) -> tuple[tuple[int, int], ...]:
        return self._ORDER

    def min_eigenvalue(self) -> float:
        """Smallest eigenvalue over all four effects (exact 2x2 formula)."""
        return min(0.5 * (s - v.norm()) for s, v in self.effects)

    def marginal_first_plus(self) -> tuple[float, Vec3]:
        (s1, v1), (s2, v2) = self.effects[0], self.effects[1]
        return (s1 + s2, v1 + v2)

    def marginal_second_plus(self) -> tuple[float, Vec3]:
        (s1, v1), (s2, v2) = self.effects[0], self.effects[2]
        return (s1 + s2, v1 + v2)


def busch_f(p: ObservablePair) -> BuschDiagnostics:
    """Evaluate the compatibility criterion for a pair of observables."""
    a1, a2 = p.first, p.second
    v1, v2 = a1.bloch, a2.bloch
    cross = v1.cross(v2)
    if cross.norm() < PARALLEL_EPS:
        return BuschDiagnostics(
            gamma=v1.dot(v2) - (a1.bias - 1.0) * (a2.bias - 1.0),
            alpha=0.0,
            beta=0.0,
            g=ZERO,
            F=-1.0,
            degenerate_parallel=True,
        )
    c2 = cross.dot(cross)
    gamma = v1.dot(v2) - (a1.bias - 1.0) * (a2.bias - 1.0)
    ca = a2.bias + gamma * a1.bias - gamma - 1.0
    cb = a1.bias + gamma * a2.bias - gamma - 1.0
    alpha = (ca * v2.dot(v2) - cb * v1.dot(v2)) / c2
    beta = (cb * v1.dot(v1) - ca * v1.dot(v2)) / c2
    g = v1.scale(alpha) + v2.scale(beta)
    F = _kernels.busch_f_raw(
        a1.bias, v1.x, v1.y, v1.z, a2.bias, v2.x, v2.y, v2.z
    )
    return BuschDiagnostics(gamma, alpha, beta, g, F, False)


def is_compatible(p: ObservablePair, tol_f: float = TOL_F) -> bool:
    d = busch_f(p)
    return d.degenerate_parallel or d.F <= tol_f


def unbiased_compat(a1: Vec3, a2: Vec3) -> bool:
    """Compatibility of the unbiased pair: |a1+a2| + |a1-a2| <= 2."""
    if a1.norm() > 1.0 + 1e-12 or a2.norm() > 1.0 + 1e-12:
        raise OutOfRangeError("unbiased Bloch vectors must have norm <= 1")
    return (a1 + a2).norm() + (a1 - a2).norm() <= 2.0 + 1e-12


def synthesize_joint_unbiased(a1: Vec3, a2: Vec3) -> JointObservable4:
    """Explicit joint observable for a compatible unbiased pair.

    Effects are G(mu,nu) = [(1 + mu*nu*c)*I + (mu*a1 + nu*a2).sigma]/4
    with the correlation scalar c feasible in
    [|a1+a2| - 1, 1 - |a1-a2|]; the midpoint maximizes positivity slack.
    """
    s = (a1 + a2).norm()
    d = (a1 - a2).norm()
    lo, hi = s - 1.0, 1.0 - d
    if lo > hi + 1e-12:
        raise IncompatibleError(
            f"pair incompatible: |a1+a2| + |a1-a2| = {s + d!r} > 2"
        )
    c = 0.5 * (s - d)
    c = min(max(c, lo), hi)
    effects = []
    for mu, nu in JointObservable4._ORDER:
        vec = a1.scale(float(mu)) + a2.scale(float(nu))
        effects.append((0.5 * (1.0 + mu * nu * c), vec.scale(0.5)))
    return JointObservable4(tuple(effects))


def depolarizing_compat(a_norm: float, t: float) -> bool:
    """Whether an unbiased observable of sharpness a_norm is compatible
    with the depolarizing channel of visibility t."""
    if not 0.0 <= a_norm <= 1.0:
        raise OutOfRangeError(f"a_norm = {a_norm!r} outside [0, 1]")
    if not 0.0 <= t <= 1.0:
        raise OutOfRangeError(f"t = {t!r} outside [0, 1]")
    threshold = 0.5 * (1.0 - t + math.sqrt((1.0 - t) * (1.0 + 3.0 * t)))
    return a_norm <= threshold + 1e-12


def mub_compat_threshold() -> float:
    """Sharpness at which the canonical mutually unbiased pair becomes
    incompatible (both observables along orthogonal axes)."""
    return 1.0 / math.sqrt(2.0)


def _joint_for_pair(p: ObservablePair) -> JointObservable4:
    """Joint observable of a compatible unbiased pair of observables."""
    if not (p.first.unbiased() and p.second.unbiased()):
        raise IncompatibleError("joint synthesis implemented for unbiased pairs only")
    return synthesize_joint_unbiased(p.first.bloch, p.second.bloch)


__all__ = [
    "BuschDiagnostics",
    "JointObservable4",
    "busch_f",
    "is_compatible",
    "unbiased_compat",
    "synthesize_joint_unbiased",
    "depolarizing_compat",
    "mub_compat_threshold",
    "TOL_F",
    "PARALLEL_EPS",
]
