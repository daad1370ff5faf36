"""Analytic boundary machinery for unbiased pairs in the xy plane.

For a through-origin section with normal parametrized by azimuth phi
and polar angle theta, the projection criterion for an in-plane
unbiased pair reduces to a quadratic inequality in X = sin^2(theta):

    L(phi)*X^2 + M(phi)*X + N >= 0   (compatible side)

with L, M >= 0 always and N < 0 exactly when the pair is incompatible,
so the incompatible pair has a unique boundary root X0(phi) in (0, 1]
and the section is compatible iff sin^2(theta) >= X0(phi).  An
equivalent radical form in terms of |a1 +/- a2| and their azimuths is
kept alongside as a numerically independent representation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .bloch import Vec3
from .errors import DomainError, NoRootError, OutOfRangeError

@dataclass(frozen=True)
class InPlanePair:
    """Unbiased pair with Bloch vectors in the xy plane, stored as
    magnitudes and azimuths: a_i = a_i_mag * (cos alpha_i, sin alpha_i, 0)."""

    a1_mag: float
    a2_mag: float
    alpha1: float
    alpha2: float

    def __post_init__(self):
        if not (0.0 < self.a1_mag <= 1.0 and 0.0 < self.a2_mag <= 1.0):
            raise OutOfRangeError("magnitudes must lie in (0, 1]")

    def vectors(self) -> tuple[Vec3, Vec3]:
        return (
            Vec3(self.a1_mag * math.cos(self.alpha1), self.a1_mag * math.sin(self.alpha1), 0.0),
            Vec3(self.a2_mag * math.cos(self.alpha2), self.a2_mag * math.sin(self.alpha2), 0.0),
        )

    def incompatible(self) -> bool:
        v1, v2 = self.vectors()
        return (v1 + v2).norm() + (v1 - v2).norm() > 2.0

    def rotated(self, delta: float) -> "InPlanePair":
        return InPlanePair(self.a1_mag, self.a2_mag, self.alpha1 + delta, self.alpha2 + delta)


@dataclass(frozen=True)
class BoundaryCoefficients:
    L: float
    M: float
    N: float


@dataclass(frozen=True)
class SumDiffFrame:
    """Magnitudes and azimuths of a1 +/- a2, the natural frame of the
    radical form."""

    sum_mag: float
    diff_mag: float
    omega_sum: float
    omega_diff: float

    @classmethod
    def of(cls, p: InPlanePair) -> "SumDiffFrame":
        v1, v2 = p.vectors()
        s = v1 + v2
        d = v1 - v2
        return cls(s.norm(), d.norm(), math.atan2(s.y, s.x), math.atan2(d.y, d.x))


@dataclass(frozen=True)
class BoundaryCurve:
    """Sampled boundary root X0 over a uniform phi grid on [0, pi).

    The compatible region of the (phi, theta) half-plane is
    {sin^2(theta) >= X0(phi)}, extended to all angles by the symmetries
    theta -> pi - theta and phi -> phi + pi.
    """

    samples: tuple[tuple[float, Optional[float]], ...]

    def min_sample(self) -> tuple[float, float]:
        """(phi, X0) of the smallest sampled root."""
        best = None
        for phi, x0 in self.samples:
            if x0 is not None and (best is None or x0 < best[1]):
                best = (phi, x0)
        if best is None:
            raise NoRootError("curve has no roots")
        return best

    def value_at_index(self, i: int) -> Optional[float]:
        return self.samples[i][1]


def coefficients(p: InPlanePair, phi: float) -> BoundaryCoefficients:
    """Quadratic coefficients of the section criterion at azimuth phi.

    The cross term carries cos(alpha1 - alpha2): the criterion depends
    on the pair only through rotation-invariant combinations, and this
    is the unique choice consistent with the projection criterion (the
    quadratic is re-derived by squaring it twice).
    """
    c1 = p.a1_mag * math.cos(phi - p.alpha1)
    c2 = p.a2_mag * math.cos(phi - p.alpha2)
    dot = p.a1_mag * p.a2_mag * math.cos(p.alpha1 - p.alpha2)
    L = c1 * c1 * c2 * c2
    M = c1 * c1 + c2 * c2 - 2.0 * dot * c1 * c2
    N = dot * dot - p.a1_mag**2 - p.a2_mag**2 + 1.0
    return BoundaryCoefficients(L, M, N)


def quartic_form(p: InPlanePair, phi: float, theta: float) -> float:
    """L*sin^4(theta) + M*sin^2(theta) + N; >= 0 on compatible sections."""
    co = coefficients(p, phi)
    s2 = math.sin(theta) ** 2
    return co.L * s2 * s2 + co.M * s2 + co.N


def radical_form(p: InPlanePair, phi: float, X: float) -> float:
    """2 - |a1+a2|*sqrt(1 - X cos^2(phi - w+)) - |a1-a2|*sqrt(1 - X cos^2(phi - w-)).

    Shares its sign with the quartic form at X = sin^2(theta).
    """
    if not 0.0 <= X <= 1.0:
        raise OutOfRangeError(f"X = {X!r} outside [0, 1]")
    fr = SumDiffFrame.of(p)
    out = 2.0
    for mag, omega in ((fr.sum_mag, fr.omega_sum), (fr.diff_mag, fr.omega_diff)):
        rad = 1.0 - X * math.cos(phi - omega) ** 2
        if rad < -1e-12:
            raise DomainError(f"radicand {rad!r} below zero")
        out -= mag * math.sqrt(max(rad, 0.0))
    return out


def boundary_root(p: InPlanePair, phi: float) -> float:
    """Unique positive root X0 of L*X^2 + M*X + N = 0 at azimuth phi.

    Requires an incompatible pair (N < 0); with L, M >= 0 the product of
    roots is then negative, so exactly one root is positive.  The
    cancellation-free branch -2N / (M + sqrt(M^2 - 4LN)) is used; it
    degrades gracefully to the linear solution -N/M as L -> 0.
    """
    co = coefficients(p, phi)
    if co.N >= 0.0:
        raise NoRootError(
            f"pair compatible on every section at phi = {phi!r} (N = {co.N!r})"
        )
    disc = co.M * co.M - 4.0 * co.L * co.N
    return -2.0 * co.N / (co.M + math.sqrt(disc))


def compatibility_curve(p: InPlanePair, grid: int) -> BoundaryCurve:
    """Boundary root sampled on the uniform grid phi_k = k*pi/grid."""
    samples = []
    for k in range(grid):
        phi = math.pi * k / grid
        try:
            x0 = boundary_root(p, phi)
        except NoRootError:
            x0 = None
        samples.append((phi, x0))
    return BoundaryCurve(tuple(samples))


def section_compatible(p: InPlanePair, phi: float, theta: float) -> bool:
    """Membership test of the compatible region via the quartic form."""
    return quartic_form(p, phi, theta) >= 0.0
