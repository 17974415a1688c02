import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("default")

SQUARE = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]


def random_guards(seed: int, n: int) -> np.ndarray:
    return np.random.default_rng(seed).random((n, 2))


@pytest.fixture
def square():
    return list(SQUARE)


def brute_hull(points):
    """Hull vertices by the all-pairs half-plane test (cubic)."""
    pts = sorted(set(map(tuple, points)))
    out = set()
    for a in pts:
        for b in pts:
            if a == b:
                continue
            sides = [(b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]) for c in pts]
            if all(s >= 0 for s in sides):
                # keep only the extreme ends of the supporting edge
                on = [c for c, s in zip(pts, sides) if s == 0]
                d = lambda c: (c[0] - a[0]) * (b[0] - a[0]) + (c[1] - a[1]) * (b[1] - a[1])
                out.add(min(on, key=d))
                out.add(max(on, key=d))
    return out


def angle_between(p, l, r) -> float:
    """Reference angle lpr via the law of cosines."""
    a = math.dist(p, l)
    b = math.dist(p, r)
    c = math.dist(l, r)
    return math.acos(max(-1.0, min(1.0, (a * a + b * b - c * c) / (2 * a * b))))


# one line per acceptance criterion, printed at the end of the run
ACCEPTANCE: list = []


def record(name: str, ok: bool, detail: str) -> None:
    ACCEPTANCE.append(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    assert ok, detail


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
