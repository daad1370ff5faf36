"""Restricted state sets: plane and line sections of the Bloch ball.

A plane section is the set of states whose Bloch vectors lie on a plane
at distance r from the origin with unit normal n.  A line section lies
in the plane with normal m, at in-plane distance r along the unit
vector n (n orthogonal to both the line direction and m).  Sets are
stored by these geometric parameters; the compatibility machinery only
ever needs the affine hull.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .bloch import Vec3
from .errors import OutOfRangeError, ParseError

_ORTHO_TOL = 1e-9


def _unit(v: Vec3, what: str) -> Vec3:
    n = v.norm()
    if n < 1e-12:
        raise OutOfRangeError(f"{what} must be a nonzero vector")
    return v.scale(1.0 / n)


@dataclass(frozen=True)
class StateSetPlane:
    r: float
    n: Vec3

    def __post_init__(self):
        if not 0.0 <= self.r <= 1.0:
            raise OutOfRangeError(f"plane distance r = {self.r!r} outside [0, 1]")
        object.__setattr__(self, "n", _unit(self.n, "plane normal"))

    @property
    def degenerate(self) -> bool:
        """True for tangent sections, which contain a single state."""
        return self.r >= 1.0 - 1e-12

    def contains(self, s: Vec3, tol: float = 1e-9) -> bool:
        return s.norm() <= 1.0 + tol and abs(s.dot(self.n) - self.r) <= tol

    def boundary_states(self, count: int) -> list[Vec3]:
        """Bloch vectors on the rim of the section disc."""
        u, v = _plane_basis(self.n)
        rho = math.sqrt(max(0.0, 1.0 - self.r * self.r))
        center = self.n.scale(self.r)
        out = []
        for k in range(count):
            ang = 2.0 * math.pi * k / count
            out.append(center + u.scale(rho * math.cos(ang)) + v.scale(rho * math.sin(ang)))
        return out


@dataclass(frozen=True)
class StateSetLine:
    r: float
    n: Vec3
    m: Vec3

    def __post_init__(self):
        if not 0.0 <= self.r <= 1.0:
            raise OutOfRangeError(f"line distance r = {self.r!r} outside [0, 1]")
        n = _unit(self.n, "in-plane normal")
        m = _unit(self.m, "plane normal")
        d = n.dot(m)
        if abs(d) > 1e-6:
            raise OutOfRangeError(f"n and m must be orthogonal (n.m = {d!r})")
        if abs(d) > 0.0:
            # re-orthogonalize against roundoff
            n = _unit(n - m.scale(d), "in-plane normal")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "m", m)

    @property
    def degenerate(self) -> bool:
        return self.r >= 1.0 - 1e-12

    def direction(self) -> Vec3:
        return self.m.cross(self.n)

    def states(self, count: int) -> list[Vec3]:
        """Bloch vectors spread along the chord."""
        d = self.direction()
        half = math.sqrt(max(0.0, 1.0 - self.r * self.r))
        center = self.n.scale(self.r)
        if count == 1:
            return [center]
        return [
            center + d.scale(half * (2.0 * k / (count - 1) - 1.0))
            for k in range(count)
        ]


@dataclass(frozen=True)
class StateSetR:
    """Through-origin plane section; always contains the maximally mixed
    state, so the projection criterion applies to unbiased pairs."""

    n: Vec3

    def __post_init__(self):
        object.__setattr__(self, "n", _unit(self.n, "plane normal"))

    def as_plane(self) -> StateSetPlane:
        return StateSetPlane(0.0, self.n)


@dataclass(frozen=True)
class AngleParam:
    phi: float
    theta: float

    def __post_init__(self):
        if not -math.pi <= self.phi < math.pi + 1e-12:
            raise OutOfRangeError(f"phi = {self.phi!r} outside [-pi, pi)")
        if not 0.0 <= self.theta <= math.pi + 1e-12:
            raise OutOfRangeError(f"theta = {self.theta!r} outside [0, pi]")

    def to_normal(self) -> Vec3:
        st = math.sin(self.theta)
        return Vec3(st * math.cos(self.phi), st * math.sin(self.phi), math.cos(self.theta))

    def antipode(self) -> "AngleParam":
        phi = self.phi + math.pi
        if phi >= math.pi:
            phi -= 2.0 * math.pi
        return AngleParam(phi, math.pi - self.theta)


def plane_from_angles(p: AngleParam, r: float) -> StateSetPlane:
    if not 0.0 <= r <= 1.0:
        raise OutOfRangeError(f"r = {r!r} outside [0, 1]")
    return StateSetPlane(r, p.to_normal())


def project_onto_R(s: StateSetR, v: Vec3) -> Vec3:
    """Orthogonal projection of v onto the section plane of s."""
    return v - s.n.scale(v.dot(s.n))


def affine_count(s: StateSetPlane | StateSetLine) -> int:
    """Number of affinely independent states spanning the section:
    3 for a plane, 2 for a line, 1 for a tangent (single-state) section."""
    if s.degenerate:
        return 1
    return 3 if isinstance(s, StateSetPlane) else 2


def _plane_basis(n: Vec3) -> tuple[Vec3, Vec3]:
    """Deterministic orthonormal basis of the plane orthogonal to n."""
    pick = Vec3(0.0, 0.0, 1.0) if abs(n.z) <= 0.9 else Vec3(1.0, 0.0, 0.0)
    u = _unit(pick.cross(n), "plane basis")
    return u, n.cross(u)


# --- text serialization (CLI flags) ---------------------------------------

def _fmt_vec(v: Vec3) -> str:
    return f"{v.x:.17g},{v.y:.17g},{v.z:.17g}"


def format_state_set(s: StateSetPlane | StateSetLine | StateSetR) -> str:
    if isinstance(s, StateSetR):
        s = s.as_plane()
    if isinstance(s, StateSetPlane):
        return f"plane r={s.r:.17g} n={_fmt_vec(s.n)}"
    return f"line r={s.r:.17g} n={_fmt_vec(s.n)} m={_fmt_vec(s.m)}"


def _parse_vec(text: str) -> Vec3:
    parts = text.split(",")
    if len(parts) != 3:
        raise ParseError(f"expected three comma-separated numbers, got {text!r}")
    try:
        x, y, z = (float(p) for p in parts)
    except ValueError as exc:
        raise ParseError(f"bad vector component in {text!r}") from exc
    return Vec3(x, y, z)


def parse_state_set(text: str) -> StateSetPlane | StateSetLine:
    """Parse "plane r=<f> n=<f>,<f>,<f>" or "line r=... n=... m=..."."""
    tokens = text.split()
    if not tokens:
        raise ParseError("empty state-set literal")
    kind, fields = tokens[0], {}
    for tok in tokens[1:]:
        if "=" not in tok:
            raise ParseError(f"malformed field {tok!r} in state-set literal")
        key, val = tok.split("=", 1)
        fields[key] = val
    try:
        if kind == "plane":
            r = float(fields["r"])
            n = _parse_vec(fields["n"])
            return StateSetPlane(r, n)
        if kind == "line":
            r = float(fields["r"])
            n = _parse_vec(fields["n"])
            m = _parse_vec(fields["m"])
            return StateSetLine(r, n, m)
    except (KeyError, ValueError) as exc:
        raise ParseError(f"bad state-set literal {text!r}: {exc}") from exc
    except OutOfRangeError as exc:
        raise ParseError(f"bad state-set literal {text!r}: {exc}") from exc
    raise ParseError(f"unknown state-set kind {kind!r} (want plane/line)")
