"""Distributed sampling at desk scale.

A referee announces a state list and a pair of observables; Alice
measures something on the unknown state and sends a classical message;
Bob answers for the observable index he received.  The behavior (the
table of outcome probabilities per state and observable) is reproducible
with classical messages exactly when the pair is section-compatible on
the announced states, so a strategy and an incompatibility certificate
are mutually exclusive outcomes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .bloch import Vec3, ObservablePair
from .errors import OutOfRangeError, ShapeMismatchError
from .jointness import JointObservable4, synthesize_joint_unbiased, unbiased_compat
from .optimizer import OptimizerConfig
from .restriction import RestrictionParams, WITNESS_TOL, s0_compatible
from .statesets import StateSetLine, StateSetPlane, StateSetR, project_onto_R

OUTCOMES = (1, -1)  # "+" and "-" in table order


@dataclass(frozen=True)
class Behavior:
    """Outcome probabilities P[x, j, i] for outcome index x in {+,-},
    state index j, observable index i in {0, 1}."""

    probabilities: np.ndarray  # shape (2, m, 2)
    states: tuple[Vec3, ...]

    def __post_init__(self):
        p = self.probabilities
        if p.shape != (2, len(self.states), 2):
            raise ShapeMismatchError(f"behavior table has shape {p.shape}")

    def prob(self, outcome: int, state_idx: int, obs_idx: int) -> float:
        return float(self.probabilities[OUTCOMES.index(outcome), state_idx, obs_idx])


@dataclass(frozen=True)
class CCStrategy:
    """Alice's observable (effects in (scalar, vector) form summing to
    the identity) plus Bob's response kernel h[x, i, z]."""

    alice_effects: tuple[tuple[float, Vec3], ...]
    bob_kernel: np.ndarray  # shape (2, 2, n_effects), rows sum to 1 over x

    def __post_init__(self):
        k = self.bob_kernel
        if k.shape[:2] != (2, 2) or k.shape[2] != len(self.alice_effects):
            raise ShapeMismatchError(f"kernel shape {k.shape} mismatches effects")
        total = sum(s for s, _ in self.alice_effects)
        vec = Vec3(
            sum(v.x for _, v in self.alice_effects),
            sum(v.y for _, v in self.alice_effects),
            sum(v.z for _, v in self.alice_effects),
        )
        if abs(total - 2.0) > 1e-9 or vec.norm() > 1e-9:
            raise ShapeMismatchError("alice effects do not sum to the identity")

    def replay(self, states: list[Vec3]) -> np.ndarray:
        """Behavior table produced by the strategy on the given states."""
        m = len(states)
        out = np.zeros((2, m, 2))
        for j, s in enumerate(states):
            weights = [0.5 * (e0 + v.dot(s)) for e0, v in self.alice_effects]
            for i in range(2):
                for xi in range(2):
                    out[xi, j, i] = sum(
                        w * self.bob_kernel[xi, i, z] for z, w in enumerate(weights)
                    )
        return out


@dataclass(frozen=True)
class Certificate:
    """Witness that no classical-communication strategy reproduces the
    behavior on the section: the shifted-pair minimum of F stays
    positive."""

    min_F: float
    argmin: RestrictionParams
    state_set: StateSetPlane | StateSetLine


def behavior_of(p: ObservablePair, states: list[Vec3]) -> Behavior:
    """Born-rule behavior of the pair on a state list."""
    for s in states:
        if s.norm() > 1.0 + 1e-12:
            raise OutOfRangeError(f"state {s} outside the Bloch ball")
    m = len(states)
    table = np.zeros((2, m, 2))
    for j, s in enumerate(states):
        for i, o in enumerate((p.first, p.second)):
            plus = o.prob_plus(s)
            table[0, j, i] = plus
            table[1, j, i] = 1.0 - plus
    return Behavior(table, tuple(states))


def _deterministic_kernel(joint: JointObservable4) -> np.ndarray:
    """Bob answers with the i-th coordinate of the joint outcome."""
    labels = joint.outcome_labels()
    k = np.zeros((2, 2, len(labels)))
    for z, (mu, nu) in enumerate(labels):
        for i, out in enumerate((mu, nu)):
            xi = OUTCOMES.index(out)
            k[xi, i, z] = 1.0
    return k


def synthesize_cc(p: ObservablePair, s: StateSetR) -> Optional[CCStrategy]:
    """Classical strategy reproducing the pair's behavior on a
    through-origin section, when one exists.

    For a compatible pair Alice measures its joint observable directly;
    otherwise the pair's Bloch vectors are projected onto the section
    (the shifted pair agreeing with it there) and the joint of the
    projections is used.  Returns None when the section detects the
    incompatibility, in which case certify_non_cc produces the witness.
    """
    if not (p.first.unbiased() and p.second.unbiased()):
        raise OutOfRangeError("strategy synthesis implemented for unbiased pairs")
    a1, a2 = p.first.bloch, p.second.bloch
    if unbiased_compat(a1, a2):
        joint = synthesize_joint_unbiased(a1, a2)
    else:
        q1, q2 = project_onto_R(s, a1), project_onto_R(s, a2)
        if not unbiased_compat(q1, q2):
            return None
        joint = synthesize_joint_unbiased(q1, q2)
    return CCStrategy(joint.effects, _deterministic_kernel(joint))


def verify_strategy(c: CCStrategy, b: Behavior, states: list[Vec3]) -> float:
    """Largest absolute deviation between the behavior and the
    strategy's replay over all (outcome, state, observable) cells."""
    if len(states) != len(b.states):
        raise ShapeMismatchError(
            f"{len(states)} states passed against a table of {len(b.states)}"
        )
    replay = c.replay(states)
    return float(np.max(np.abs(replay - b.probabilities)))


def certify_non_cc(
    p: ObservablePair,
    s: StateSetPlane | StateSetLine,
    opt: OptimizerConfig | None = None,
) -> Optional[Certificate]:
    """Witness that the behavior on the section is not classically
    reproducible; None when the pair is section-compatible there."""
    verdict = s0_compatible(p, s, opt)
    if verdict.min_F > WITNESS_TOL:
        return Certificate(verdict.min_F, verdict.argmin, s)
    return None
