"""Bloch-vector algebra and binary qubit observables.

A binary qubit observable is stored as a bias scalar ``a0`` and a Bloch
vector ``a``; its effects are ``E(+) = (a0*I + a.sigma)/2`` and
``E(-) = I - E(+)``.  Positivity of both effects is equivalent to
``|a| <= a0 <= 2 - |a|``, which every constructor enforces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import OutOfRangeError, VectorTooLongError

# Absolute slack for all POVM inequality checks; constructors repair
# violations up to this size so boundary observables survive roundoff.
VALIDITY_TOL = 1e-12


@dataclass(frozen=True)
class Vec3:
    """Immutable 3-vector of Bloch coordinates."""

    x: float
    y: float
    z: float

    def __add__(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x - other.x, self.y - other.y, self.z - other.z)

    def __neg__(self) -> "Vec3":
        return Vec3(-self.x, -self.y, -self.z)

    def scale(self, c: float) -> "Vec3":
        return Vec3(c * self.x, c * self.y, c * self.z)

    def dot(self, other: "Vec3") -> float:
        return self.x * other.x + self.y * other.y + self.z * other.z

    def cross(self, other: "Vec3") -> "Vec3":
        return Vec3(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )

    def norm(self) -> float:
        return math.sqrt(self.dot(self))

    def normalized(self) -> "Vec3":
        n = self.norm()
        if n == 0.0:
            raise OutOfRangeError("cannot normalize the zero vector")
        return self.scale(1.0 / n)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.z)


ZERO = Vec3(0.0, 0.0, 0.0)
X_AXIS = Vec3(1.0, 0.0, 0.0)
Y_AXIS = Vec3(0.0, 1.0, 0.0)
Z_AXIS = Vec3(0.0, 0.0, 1.0)


@dataclass(frozen=True)
class QubitObservable:
    """Binary qubit POVM given by bias scalar and Bloch vector."""

    bias: float
    bloch: Vec3

    def __post_init__(self):
        norm = self.bloch.norm()
        limit = min(self.bias, 2.0 - self.bias)
        if norm > limit + VALIDITY_TOL:
            raise OutOfRangeError(
                f"invalid observable: |a|={norm!r} outside [{-limit!r}..] "
                f"for bias {self.bias!r}"
            )
        if norm > limit > 0.0:
            # roundoff repair: shrink the vector onto the positivity boundary
            object.__setattr__(self, "bloch", self.bloch.scale(limit / norm))
        elif norm > limit:
            object.__setattr__(self, "bloch", ZERO)

    def unbiased(self) -> bool:
        return abs(self.bias - 1.0) <= VALIDITY_TOL

    def effect_plus(self) -> tuple[float, Vec3]:
        """E(+) in (scalar, vector) form: E = (s*I + v.sigma)/2."""
        return (self.bias, self.bloch)

    def effect_minus(self) -> tuple[float, Vec3]:
        return (2.0 - self.bias, -self.bloch)

    def prob_plus(self, state: Vec3) -> float:
        """Outcome-(+) probability on the state with Bloch vector ``state``."""
        return 0.5 * (self.bias + self.bloch.dot(state))


@dataclass(frozen=True)
class ObservablePair:
    first: QubitObservable
    second: QubitObservable

    def swapped(self) -> "ObservablePair":
        return ObservablePair(self.second, self.first)


def make_unbiased(a: Vec3) -> QubitObservable:
    """Unbiased observable (bias 1) for a Bloch vector with |a| <= 1."""
    norm = a.norm()
    if norm > 1.0 + VALIDITY_TOL:
        raise VectorTooLongError(f"|a| = {norm!r} exceeds 1")
    return QubitObservable(1.0, a)


def make_mub_pair(t: float) -> ObservablePair:
    """The canonical mutually unbiased pair with Bloch vectors t*x and t*y."""
    if not 0.0 <= t <= 1.0:
        raise OutOfRangeError(f"sharpness t = {t!r} outside [0, 1]")
    return ObservablePair(
        make_unbiased(Vec3(t, 0.0, 0.0)), make_unbiased(Vec3(0.0, t, 0.0))
    )


def conjugate_swap_xy(o: QubitObservable) -> QubitObservable:
    """Conjugate by the unitary exchanging the x and y Pauli axes.

    The Bloch vector transforms as (x, y, z) -> (y, x, -z); the bias is
    untouched.  Applying it twice is the identity.
    """
    b = o.bloch
    return QubitObservable(o.bias, Vec3(b.y, b.x, -b.z))


def swap_xy_vec(v: Vec3) -> Vec3:
    """The same axis exchange applied to a bare vector (state-set normals)."""
    return Vec3(v.y, v.x, -v.z)
