import math

import numpy as np
import pytest

from incompat.bloch import Vec3, ObservablePair, make_mub_pair, make_unbiased
from incompat.errors import OutOfRangeError, ShapeMismatchError
from incompat.optimizer import OptimizerConfig
from incompat.restriction import s0R_slack
from incompat.sampling import (
    CCStrategy,
    behavior_of,
    certify_non_cc,
    synthesize_cc,
    verify_strategy,
)
from incompat.statesets import StateSetPlane, StateSetR

from conftest import random_unbiased_pair, random_unit

FAST = OptimizerConfig(starts=12)


def test_behavior_maximally_mixed():
    b = behavior_of(make_mub_pair(0.8), [Vec3(0, 0, 0)])
    for i in range(2):
        assert b.prob(1, 0, i) == pytest.approx(0.5)
        assert b.prob(-1, 0, i) == pytest.approx(0.5)


def test_behavior_aligned_state():
    o = make_unbiased(Vec3(0.6, 0.0, 0.0))
    pair = ObservablePair(o, make_unbiased(Vec3(0.0, 0.0, 0.0)))
    b = behavior_of(pair, [Vec3(1, 0, 0)])
    assert b.prob(1, 0, 0) == pytest.approx(0.8)  # (1 + 0.6)/2


def test_behavior_mub_eigenstates():
    b = behavior_of(make_mub_pair(1.0), [Vec3(1, 0, 0), Vec3(0, 1, 0)])
    assert b.prob(1, 0, 0) == pytest.approx(1.0)
    assert b.prob(1, 1, 1) == pytest.approx(1.0)
    assert b.prob(1, 0, 1) == pytest.approx(0.5)
    assert b.prob(1, 1, 0) == pytest.approx(0.5)


def test_behavior_rejects_outside_ball():
    with pytest.raises(OutOfRangeError):
        behavior_of(make_mub_pair(0.5), [Vec3(1.2, 0, 0)])


def test_behavior_columns_normalized(rng):
    pair = random_unbiased_pair(rng)
    states = [random_unit(rng).scale(rng.uniform(0, 1)) for _ in range(7)]
    b = behavior_of(pair, states)
    sums = b.probabilities.sum(axis=0)
    assert np.allclose(sums, 1.0, atol=1e-12)


def test_synthesize_on_detecting_section_absent():
    # normal z keeps the sharpest pair intact: detection, no strategy
    assert synthesize_cc(make_mub_pair(1.0), StateSetR(Vec3(0, 0, 1))) is None


def test_synthesize_on_hiding_section_replays():
    pair = make_mub_pair(1.0)
    s = StateSetR(Vec3(1, 0, 0))
    strategy = synthesize_cc(pair, s)
    assert strategy is not None
    states = s.as_plane().boundary_states(12)
    behavior = behavior_of(pair, states)
    assert verify_strategy(strategy, behavior, states) < 1e-9


def test_synthesize_compatible_pair_any_section(rng):
    pair = make_mub_pair(0.5)
    for _ in range(10):
        s = StateSetR(random_unit(rng))
        strategy = synthesize_cc(pair, s)
        assert strategy is not None
        states = s.as_plane().boundary_states(8) + [Vec3(0, 0, 0)]
        behavior = behavior_of(pair, states)
        assert verify_strategy(strategy, behavior, states) < 1e-9


def test_trivial_pair_uniform_strategy():
    pair = ObservablePair(
        make_unbiased(Vec3(0, 0, 0)), make_unbiased(Vec3(0, 0, 0))
    )
    s = StateSetR(Vec3(0, 0, 1))
    strategy = synthesize_cc(pair, s)
    states = s.as_plane().boundary_states(6)
    behavior = behavior_of(pair, states)
    assert verify_strategy(strategy, behavior, states) == pytest.approx(0.0, abs=1e-15)


def test_random_bob_kernel_fails_on_sharp_behavior():
    pair = make_mub_pair(1.0)
    states = [Vec3(1, 0, 0), Vec3(0, 1, 0)]
    behavior = behavior_of(pair, states)
    good = synthesize_cc(make_mub_pair(0.5), StateSetR(Vec3(0, 0, 1)))
    uniform = CCStrategy(good.alice_effects, np.full((2, 2, 4), 0.5))
    assert verify_strategy(uniform, behavior, states) >= 0.25


def test_verify_shape_mismatch():
    pair = make_mub_pair(0.5)
    states = [Vec3(0, 0, 0)]
    behavior = behavior_of(pair, states)
    strategy = synthesize_cc(pair, StateSetR(Vec3(0, 0, 1)))
    with pytest.raises(ShapeMismatchError):
        verify_strategy(strategy, behavior, states + [Vec3(0, 0, 0)])


def test_certificate_on_detecting_section():
    cert = certify_non_cc(make_mub_pair(1.0), StateSetPlane(0.0, Vec3(0, 0, 1)), FAST)
    assert cert is not None
    assert cert.min_F > 1e-7
    # determinism of the replayed certificate
    again = certify_non_cc(make_mub_pair(1.0), StateSetPlane(0.0, Vec3(0, 0, 1)), FAST)
    assert again.min_F == cert.min_F


def test_certificate_absent_for_compatible():
    assert certify_non_cc(make_mub_pair(0.5), StateSetPlane(0.0, Vec3(0, 0, 1)), FAST) is None


def test_strategy_certificate_dichotomy(rng):
    # exactly one of {strategy, certificate} per instance, boundary aside
    agreements = 0
    for _ in range(60):
        pair = random_unbiased_pair(rng)
        n = random_unit(rng)
        slack = s0R_slack(pair.first.bloch, pair.second.bloch, StateSetR(n))
        if abs(slack) <= 1e-6:
            continue
        strategy = synthesize_cc(pair, StateSetR(n))
        cert = certify_non_cc(pair, StateSetPlane(0.0, n), FAST)
        assert (strategy is None) == (cert is not None)
        if strategy is not None:
            states = StateSetPlane(0.0, n).boundary_states(10)
            behavior = behavior_of(pair, states)
            assert verify_strategy(strategy, behavior, states) < 1e-9
        agreements += 1
    assert agreements >= 40
