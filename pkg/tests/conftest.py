import math

import numpy as np
import pytest

from incompat.bloch import Vec3, ObservablePair, QubitObservable


def random_unit(rng) -> Vec3:
    v = rng.normal(size=3)
    v /= np.linalg.norm(v)
    return Vec3(*v)


def random_ball_vec(rng, radius: float = 1.0) -> Vec3:
    """Uniform in the ball of the given radius."""
    return random_unit(rng).scale(radius * rng.uniform(0.0, 1.0) ** (1.0 / 3.0))


def random_unbiased_pair(rng) -> ObservablePair:
    return ObservablePair(
        QubitObservable(1.0, random_ball_vec(rng)),
        QubitObservable(1.0, random_ball_vec(rng)),
    )


def random_biased_observable(rng) -> QubitObservable:
    a = random_ball_vec(rng)
    norm = a.norm()
    bias = rng.uniform(norm, 2.0 - norm)
    return QubitObservable(bias, a)


def random_biased_pair(rng) -> ObservablePair:
    return ObservablePair(random_biased_observable(rng), random_biased_observable(rng))


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)


# one pass/fail line per acceptance criterion at the end of the run
_ACCEPTANCE: dict[str, str] = {}


def record_acceptance(name: str, outcome: str) -> None:
    _ACCEPTANCE[name] = outcome


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    reports = []
    for rep in terminalreporter.stats.get("passed", []):
        if "test_acceptance" in rep.nodeid:
            reports.append((rep.nodeid.split("::")[-1], "PASS"))
    for rep in terminalreporter.stats.get("failed", []):
        if "test_acceptance" in rep.nodeid:
            reports.append((rep.nodeid.split("::")[-1], "FAIL"))
    for rep in terminalreporter.stats.get("skipped", []):
        if "test_acceptance" in rep.nodeid:
            reports.append((rep.nodeid.split("::")[-1], "SKIP"))
    if not reports:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for name, outcome in sorted(reports):
        extra = _ACCEPTANCE.get(name, "")
        terminalreporter.write_line(f"{outcome}  {name}" + (f"  [{extra}]" if extra else ""))
