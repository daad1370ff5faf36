import math

import numpy as np
import pytest

from incompat.boundary import (
    InPlanePair,
    SumDiffFrame,
    boundary_root,
    coefficients,
    compatibility_curve,
    quartic_form,
    radical_form,
    section_compatible,
)
from incompat.errors import NoRootError, OutOfRangeError
from incompat.restriction import s0R_slack
from incompat.statesets import AngleParam, StateSetR


def mub(t: float) -> InPlanePair:
    return InPlanePair(t, t, 0.0, math.pi / 2)


def random_in_plane(rng, incompatible=False) -> InPlanePair:
    while True:
        p = InPlanePair(
            rng.uniform(0.05, 1.0),
            rng.uniform(0.05, 1.0),
            rng.uniform(0.0, 2 * math.pi),
            rng.uniform(0.0, 2 * math.pi),
        )
        if not incompatible or p.incompatible():
            return p


def test_mub_coefficients_closed_form(rng):
    for t in (0.75, 0.9, 1.0):
        for phi in rng.uniform(0, math.pi, 10):
            co = coefficients(mub(t), phi)
            assert co.L == pytest.approx(
                t**4 * math.cos(phi) ** 2 * math.sin(phi) ** 2, abs=1e-12
            )
            assert co.M == pytest.approx(t**2, abs=1e-12)
            assert co.N == pytest.approx(1 - 2 * t**2, abs=1e-12)


def test_coefficients_periodic(rng):
    p = random_in_plane(rng)
    for phi in rng.uniform(0, math.pi, 20):
        a = coefficients(p, phi)
        b = coefficients(p, phi + math.pi)
        assert a.L == pytest.approx(b.L, abs=1e-12)
        assert a.M == pytest.approx(b.M, abs=1e-12)


def test_coefficient_signs_and_lower_bound(rng):
    for _ in range(300):
        p = random_in_plane(rng)
        phi = rng.uniform(0, 2 * math.pi)
        co = coefficients(p, phi)
        assert co.L >= -1e-15
        bound = (
            abs(p.a1_mag * math.cos(phi - p.alpha1))
            - abs(p.a2_mag * math.cos(phi - p.alpha2))
        ) ** 2
        assert co.M >= bound - 1e-12
        if p.incompatible():
            assert co.N < 1e-12


def test_coefficients_rotation_covariant(rng):
    # rotating the pair and the azimuth together leaves everything fixed
    for _ in range(100):
        p = random_in_plane(rng)
        phi = rng.uniform(0, 2 * math.pi)
        delta = rng.uniform(0, 2 * math.pi)
        a = coefficients(p, phi)
        b = coefficients(p.rotated(delta), phi + delta)
        assert a.L == pytest.approx(b.L, abs=1e-10)
        assert a.M == pytest.approx(b.M, abs=1e-10)
        assert a.N == pytest.approx(b.N, abs=1e-10)


def test_quartic_form_against_projection(rng):
    # sign of the quartic form decides section compatibility
    for _ in range(500):
        p = random_in_plane(rng)
        v1, v2 = p.vectors()
        phi = rng.uniform(0, 2 * math.pi)
        theta = rng.uniform(0, math.pi)
        slack = s0R_slack(v1, v2, StateSetR(AngleParam(0, 0).to_normal())) if False else None
        n = AngleParam(
            phi if phi < math.pi else phi - 2 * math.pi, theta
        ).to_normal()
        from incompat.statesets import StateSetR as SSR

        slack = s0R_slack(v1, v2, SSR(n))
        f = quartic_form(p, phi, theta)
        if abs(slack) > 1e-7 and abs(f) > 1e-12:
            assert (slack <= 0) == (f >= 0)


def test_lemma_symmetries_and_monotonicity(rng):
    thetas = np.linspace(0.0, math.pi / 2, 101)
    for _ in range(100):
        p = random_in_plane(rng, incompatible=True)
        phi = rng.uniform(0, 2 * math.pi)
        vals = [quartic_form(p, phi, th) for th in thetas]
        # mirror and antipodal symmetry
        for th in rng.uniform(0, math.pi, 10):
            assert quartic_form(p, phi, th) == pytest.approx(
                quartic_form(p, phi, math.pi - th), abs=1e-10
            )
            assert quartic_form(p, phi, th) == pytest.approx(
                quartic_form(p, phi + math.pi, th), abs=1e-10
            )
        # strictly increasing on [0, pi/2]
        assert all(b - a > -1e-10 for a, b in zip(vals, vals[1:]))
        # endpoint signs
        assert vals[0] < 0.0
        assert vals[-1] >= -1e-10


def test_radical_form_matches_quartic_sign(rng):
    for _ in range(1000):
        p = random_in_plane(rng)
        phi = rng.uniform(0, 2 * math.pi)
        X = rng.uniform(0.0, 1.0)
        g = radical_form(p, phi, X)
        theta = math.asin(math.sqrt(X))
        f = quartic_form(p, phi, theta)
        if abs(g) > 1e-7:
            assert (g >= 0) == (f >= 0)


def test_radical_form_at_zero():
    p = mub(0.9)
    v1, v2 = p.vectors()
    expect = 2.0 - (v1 + v2).norm() - (v1 - v2).norm()
    assert radical_form(p, 0.3, 0.0) == pytest.approx(expect, abs=1e-12)
    assert radical_form(p, 0.3, 0.0) < 0  # incompatible pair


def test_radical_form_domain():
    with pytest.raises(OutOfRangeError):
        radical_form(mub(0.9), 0.0, 1.5)


def test_sum_diff_frame_parallelogram(rng):
    for _ in range(200):
        p = random_in_plane(rng)
        fr = SumDiffFrame.of(p)
        assert fr.sum_mag**2 + fr.diff_mag**2 == pytest.approx(
            2 * (p.a1_mag**2 + p.a2_mag**2), abs=1e-10
        )


def test_boundary_root_mub_values():
    # linear case at phi = 0
    assert boundary_root(mub(0.9), 0.0) == pytest.approx(
        (2 * 0.81 - 1) / 0.81, abs=1e-12
    )
    # quadratic case at phi = pi/4 for the sharpest pair
    assert boundary_root(mub(1.0), math.pi / 4) == pytest.approx(
        2 * (math.sqrt(2) - 1), abs=1e-12
    )


def test_boundary_root_requires_incompatible():
    with pytest.raises(NoRootError):
        boundary_root(mub(0.5), 0.3)


def test_boundary_root_residuals(rng):
    for _ in range(100):
        p = random_in_plane(rng, incompatible=True)
        for k in range(24):
            phi = math.pi * k / 24
            x0 = boundary_root(p, phi)
            co = coefficients(p, phi)
            assert abs(co.L * x0 * x0 + co.M * x0 + co.N) <= 1e-10
            assert 0.0 < x0 <= 1.0 + 1e-12


def test_curve_mub_symmetries():
    curve = compatibility_curve(mub(1.0), 720)
    xs = [x for _, x in curve.samples]
    # quarter-period symmetry and reflection symmetry
    for k in range(720):
        assert xs[k] == pytest.approx(xs[(k + 360) % 720], abs=1e-10)
        assert xs[k] == pytest.approx(xs[(-k) % 720], abs=1e-10)
    phi_min, x_min = curve.min_sample()
    assert phi_min == pytest.approx(math.pi / 4, abs=1e-9)
    assert x_min == pytest.approx(2 * (math.sqrt(2) - 1), abs=1e-12)


def test_curve_translates_under_rotation(rng):
    p = random_in_plane(rng, incompatible=True)
    grid = 180
    delta = math.pi * 37 / grid  # a whole number of grid steps
    a = compatibility_curve(p, grid)
    b = compatibility_curve(p.rotated(delta), grid)
    for k in range(grid):
        xa = a.samples[k][1]
        xb = b.samples[(k + 37) % grid][1]
        assert xa == pytest.approx(xb, abs=1e-9)


def test_section_compatible_region_direction():
    # the compatible side is large sin(theta): polar sections detect the
    # incompatibility, equatorial normals hide it
    p = mub(1.0)
    assert not section_compatible(p, 0.3, 0.0)
    assert section_compatible(p, math.pi / 2, math.pi / 2)
