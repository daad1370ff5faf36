import math

import numpy as np
import pytest

from incompat.bloch import Vec3, make_mub_pair
from incompat.errors import NonFiniteError, NotBracketedError
from incompat.optimizer import MinResult, OptimizerConfig, bisect_threshold, minimize
from incompat.restriction import s0_compatible_plane
from incompat.statesets import StateSetPlane

BOX2 = [(-5.0, 5.0), (-5.0, 5.0)]


def quadratic(x):
    return (x[0] - 1.0) ** 2 + (x[1] - 2.0) ** 2


def test_unconstrained_quadratic():
    res = minimize(quadratic, [], BOX2)
    assert res.value <= 1e-10
    assert abs(res.point[0] - 1.0) <= 1e-5 and abs(res.point[1] - 2.0) <= 1e-5


def test_active_constraint():
    res = minimize(quadratic, [lambda x: x[0]], BOX2)
    assert abs(res.point[0]) <= 1e-3 and abs(res.point[1] - 2.0) <= 1e-3
    assert res.value == pytest.approx(1.0, abs=1e-2)
    assert res.feasibility_violation <= 1e-7


def test_never_worse_than_origin():
    # objective minimized away from 0 but constraint pins us near it
    res = minimize(
        lambda x: (x[0] - 3.0) ** 2,
        [lambda x: abs(x[0]) - 1e-9],
        [(-4.0, 4.0)],
    )
    assert res.value <= (0.0 - 3.0) ** 2 + 1e-9


def test_non_finite_objective_raises():
    with pytest.raises(NonFiniteError):
        minimize(lambda x: math.inf, [], [(-1.0, 1.0)])


def test_determinism():
    cfg = OptimizerConfig(seed=7)
    a = minimize(quadratic, [lambda x: x[0] + x[1] - 1.0], BOX2, cfg)
    b = minimize(quadratic, [lambda x: x[0] + x[1] - 1.0], BOX2, cfg)
    assert a == b


def test_grid_oracle_dominance(rng):
    # solver result never exceeds a fine grid minimum by more than 1e-4
    from conftest import random_unbiased_pair

    for _ in range(100):
        pair = random_unbiased_pair(rng)
        n = rng.normal(size=3)
        n /= np.linalg.norm(n)
        s = StateSetPlane(rng.uniform(0.0, 0.9), Vec3(*n))
        verdict = s0_compatible_plane(pair, s)
        grid_min = _grid_min_f(pair, s, 201)
        assert verdict.min_F <= grid_min + 1e-4


def _grid_min_f(pair, s, points):
    from incompat._kernels import busch_f_raw

    a1, a2 = pair.first, pair.second
    lams = np.linspace(-2.0, 2.0, points)
    best = math.inf
    for l1 in lams:
        t10 = a1.bias - l1 * s.r
        t1 = a1.bloch + s.n.scale(l1)
        if t1.norm() > t10 or t10 + t1.norm() > 2.0:
            continue
        for l2 in lams:
            t20 = a2.bias - l2 * s.r
            t2 = a2.bloch + s.n.scale(l2)
            if t2.norm() > t20 or t20 + t2.norm() > 2.0:
                continue
            f = busch_f_raw(t10, t1.x, t1.y, t1.z, t20, t2.x, t2.y, t2.z)
            if f < best:
                best = f
    return best


def test_bisect_known_root():
    lo, hi = bisect_threshold(lambda t: t <= 1.0 / math.sqrt(2.0), 0.5, 1.0, 1e-6)
    assert hi - lo <= 1e-6
    assert lo <= 1.0 / math.sqrt(2.0) <= hi


def test_bisect_wide_tolerance_returns_input():
    assert bisect_threshold(lambda t: t < 0.7, 0.6, 0.8, 0.5) == (0.6, 0.8)


def test_bisect_not_bracketed():
    with pytest.raises(NotBracketedError):
        bisect_threshold(lambda t: True, 0.0, 1.0, 1e-3)


def test_bisect_mub_threshold_via_criterion():
    from incompat.jointness import is_compatible

    lo, hi = bisect_threshold(
        lambda t: is_compatible(make_mub_pair(t)), 0.5, 1.0, 1e-8
    )
    assert abs(0.5 * (lo + hi) - 1.0 / math.sqrt(2.0)) <= 1e-6
