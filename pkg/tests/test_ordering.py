import math

import numpy as np
import pytest

from incompat.bloch import Vec3, ObservablePair, make_mub_pair, make_unbiased
from incompat.errors import OutOfRangeError
from incompat.optimizer import OptimizerConfig
from incompat.ordering import (
    CONSISTENT,
    REFUTED,
    SUFFICIENT_CONVEX,
    SUFFICIENT_POST,
    SearchConfig,
    classify_region,
    convex_region_blue,
    convex_region_oracle,
    dimensions,
    equivalence_probe,
    fibonacci_sphere,
    mub_tilted_pair,
    order_check,
    post_processing_check,
    sR_witness_search,
    tmax_bracket_for_theta,
    tmax_for_theta,
)
from incompat.restriction import s0_compatible
from incompat.statesets import StateSetR

# small grids keep unit runtime low; full-scale runs live in acceptance
SMALL = SearchConfig(
    sphere_points=600,
    r_values=(0.0, 0.2, 0.4, 0.6, 0.8),
    line_sphere_points=24,
    line_directions=8,
    line_r_values=(0.0, 0.3, 0.6, 0.9),
    optimizer=OptimizerConfig(starts=12),
    confirm_scans=False,
)


def test_fibonacci_sphere_is_unit_and_deterministic():
    pts = fibonacci_sphere(500)
    assert np.allclose(np.linalg.norm(pts, axis=1), 1.0, atol=1e-12)
    assert np.array_equal(pts, fibonacci_sphere(500))


# --- blue region ---------------------------------------------------------------


def test_convex_region_blue_examples():
    # cos(theta) = 1 beats 1/0.9 - 1 + sqrt(2 - 1/0.81) ~ 0.986
    assert convex_region_blue(0.9, 0.0)
    assert not convex_region_blue(0.9, math.pi / 4)
    assert convex_region_blue(1.0, 0.0)  # pure weight-1 mixture
    with pytest.raises(OutOfRangeError):
        convex_region_blue(0.5, 0.0)


def test_convex_oracle_examples():
    assert convex_region_oracle(1.0, 0.0)
    assert not convex_region_oracle(1.0, math.pi / 2)
    assert convex_region_oracle(0.7075, 0.0)


def test_blue_oracle_agreement_small_grid():
    lo = 1.0 / math.sqrt(2.0)
    mismatches = 0
    for i in range(21):
        t = lo + (1.0 - lo) * (i + 1) / 21
        for j in range(19):
            theta = (math.pi / 2) * j / 18
            closed = convex_region_blue(t, theta)
            swept = convex_region_oracle(t, theta, 2000)
            if closed != swept:
                mismatches += 1
                # disagreement only at the analytic boundary
                gap = abs(
                    1.0 / t - 1.0 + math.sqrt(max(0.0, 2.0 - 1.0 / t**2)) - math.cos(theta)
                )
                assert gap < 2e-3
    assert mismatches <= 8


# --- post-processing -----------------------------------------------------------


def test_post_processing_shrunk_vector():
    a = make_unbiased(Vec3(0.8, 0.0, 0.0))
    b = make_unbiased(Vec3(0.4, 0.0, 0.0))
    p = post_processing_check(b, a)
    assert p is not None
    (u, v), (u2, v2) = p
    assert u == pytest.approx(0.75) and v == pytest.approx(0.25)
    assert u2 == pytest.approx(0.25) and v2 == pytest.approx(0.75)


def test_post_processing_identity():
    a = make_unbiased(Vec3(0.3, 0.4, 0.0))
    p = post_processing_check(a, a)
    assert p is not None
    assert p[0][0] == pytest.approx(1.0) and p[0][1] == pytest.approx(0.0)


def test_post_processing_orthogonal_absent():
    a = make_unbiased(Vec3(0.8, 0.0, 0.0))
    b = make_unbiased(Vec3(0.0, 0.5, 0.0))
    assert post_processing_check(b, a) is None


def test_post_processing_reproduces_effects(rng):
    from conftest import random_ball_vec

    for _ in range(100):
        a_vec = random_ball_vec(rng)
        c = rng.uniform(-1.0, 1.0)
        if abs(c) * a_vec.norm() > 1.0:
            continue
        a = make_unbiased(a_vec)
        b = make_unbiased(a_vec.scale(c))
        p = post_processing_check(b, a)
        assert p is not None
        (u, v), _ = p
        # b(+) = u a(+) + v a(-)
        assert u * a.bias + v * (2 - a.bias) == pytest.approx(b.bias, abs=1e-9)
        got = a.bloch.scale(u - v)
        assert (got - b.bloch).norm() <= 1e-9


# --- witness search ------------------------------------------------------------


def test_sr_witness_found_in_gray_region():
    lesser = mub_tilted_pair(0.95, math.pi / 4)
    w = sR_witness_search(lesser, make_mub_pair(1.0), 600)
    assert w is not None
    # replay: the witness detects the lesser pair but not the greater
    from incompat.restriction import s0R_slack

    assert s0R_slack(lesser.first.bloch, lesser.second.bloch, w) > 1e-7
    g = make_mub_pair(1.0)
    assert s0R_slack(g.first.bloch, g.second.bloch, w) <= 1e-12


def test_sr_witness_absent_for_compatible_lesser():
    assert sR_witness_search(make_mub_pair(0.5), make_mub_pair(1.0), 400) is None


def test_sr_witness_absent_for_identical_pairs():
    p = make_mub_pair(0.9)
    assert sR_witness_search(p, p, 400) is None


# --- order_check ---------------------------------------------------------------


def test_order_check_trivial_for_compatible_lesser():
    v = order_check(make_mub_pair(0.6), make_mub_pair(1.0), SMALL)
    assert v.kind == CONSISTENT and "trivially" in v.note


def test_order_check_convex_sufficient():
    # inside the blue region: t = 0.9, theta = 0
    v = order_check(mub_tilted_pair(0.9, 0.0), make_mub_pair(1.0), SMALL)
    assert v.kind in (SUFFICIENT_CONVEX, SUFFICIENT_POST)


def test_order_check_post_processing():
    a = ObservablePair(
        make_unbiased(Vec3(0.9, 0.0, 0.0)), make_unbiased(Vec3(0.0, 0.9, 0.0))
    )
    b = ObservablePair(
        make_unbiased(Vec3(0.81, 0.0, 0.0)), make_unbiased(Vec3(0.0, 0.81, 0.0))
    )
    v = order_check(b, a, SMALL)
    assert v.kind in (SUFFICIENT_CONVEX, SUFFICIENT_POST)


def test_order_check_refuted_in_gray():
    v = order_check(mub_tilted_pair(0.95, math.pi / 4), make_mub_pair(1.0), SMALL)
    assert v.kind == REFUTED
    assert v.witness is not None


def test_order_check_consistent_in_ordered_band():
    v = order_check(mub_tilted_pair(0.73, math.pi / 4), make_mub_pair(1.0), SMALL)
    assert v.kind == CONSISTENT


def test_order_check_witness_replay():
    v = order_check(mub_tilted_pair(0.97, math.pi / 3), make_mub_pair(1.0), SMALL)
    assert v.kind == REFUTED
    w = v.witness
    lesser, greater = mub_tilted_pair(0.97, math.pi / 3), make_mub_pair(1.0)
    if isinstance(w, StateSetR):
        from incompat.restriction import s0R_slack

        assert s0R_slack(lesser.first.bloch, lesser.second.bloch, w) > 1e-7
        assert s0R_slack(greater.first.bloch, greater.second.bloch, w) <= 1e-12
    else:
        assert not s0_compatible(lesser, w, SMALL.optimizer).compatible
        assert s0_compatible(greater, w, SMALL.optimizer).compatible


# --- tmax / classification ------------------------------------------------------


def test_tmax_theta_zero_is_one():
    res = tmax_bracket_for_theta(0.0, SMALL)
    assert res.lo == res.hi == 1.0


def test_tmax_pi_over_4_near_table_value():
    # full-precision runs live in the acceptance suite; even the small
    # grid must land in the right neighborhood
    t = tmax_for_theta(math.pi / 4, SMALL)
    assert abs(t - 0.768) <= 0.02


def test_tmax_monotone_in_theta():
    values = [
        tmax_for_theta(th, SMALL)
        for th in (math.pi / 12, math.pi / 6, math.pi / 4, math.pi / 3)
    ]
    assert all(a >= b - 1e-9 for a, b in zip(values, values[1:]))


def test_classify_region_examples():
    assert classify_region(0.95, math.pi / 4, SMALL).label == "gray"
    assert classify_region(0.72, math.pi / 3, SMALL).label in ("ordered_new", "blue")
    assert classify_region(0.9, 0.0, SMALL).label == "blue"
    # (0.74, pi/12): 1/t - 1 + sqrt(2 - 1/t^2) = 0.768 <= cos(pi/12) = 0.966,
    # and the mixing-weight sweep agrees, so the point is blue
    assert convex_region_oracle(0.74, math.pi / 12, 2000)
    assert classify_region(0.74, math.pi / 12, SMALL).label == "blue"


def test_blue_region_never_witnessed():
    # inside blue, no through-origin section separates the pairs
    rng = np.random.default_rng(5)
    lo = 1.0 / math.sqrt(2.0)
    count = 0
    while count < 40:
        t = rng.uniform(lo + 1e-3, 1.0)
        theta = rng.uniform(0.0, math.pi / 2)
        if not convex_region_blue(t, theta):
            continue
        count += 1
        assert sR_witness_search(mub_tilted_pair(t, theta), make_mub_pair(1.0), 600) is None


# --- dimensions / equivalence ----------------------------------------------------


def test_dimensions_rejects_compatible():
    with pytest.raises(OutOfRangeError):
        dimensions(make_mub_pair(0.5), SMALL)


def test_dimensions_mub():
    rep = dimensions(make_mub_pair(1.0), SMALL)
    # a plane witness always exists for an incompatible pair; line
    # detection is settled by the scan either way
    assert rep.chi_inc in (2, 3)
    assert rep.chi_com == 3
    assert rep.witnesses["chi_com"] is not None
    if rep.chi_inc == 2:
        w = rep.witnesses["chi_inc"]
        assert not s0_compatible(make_mub_pair(1.0), w, SMALL.optimizer).compatible
    # chi_com witness replays as compatible
    wc = rep.witnesses["chi_com"]
    assert s0_compatible(make_mub_pair(1.0), wc, SMALL.optimizer).compatible


def test_equivalence_trivially_identical():
    p = make_mub_pair(0.9)
    q = ObservablePair(
        make_unbiased(Vec3(0.0, -0.9, 0.0)), make_unbiased(Vec3(0.9, 0.0, 0.0))
    )  # (-a2, a1): the same pair up to relabeling
    v = equivalence_probe(p, q, SMALL)
    assert v.kind == "IndistinguishableUpToBudget"


def test_equivalence_distinct_pairs():
    p = make_mub_pair(0.9)
    q = mub_tilted_pair(0.9, math.pi / 3)
    v = equivalence_probe(p, q, SMALL)
    assert v.kind == "DistinctWithWitness"


def test_equivalence_compatible_pairs():
    v = equivalence_probe(make_mub_pair(0.3), make_mub_pair(0.6), SMALL)
    assert v.kind == "IndistinguishableUpToBudget"
