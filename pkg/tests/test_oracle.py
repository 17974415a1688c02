import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from conftest import SQUARE, random_guards
from thetaguard.geometry import TWO_PI, Point, convex_hull
from thetaguard.oracle import (
    ANGLE_EPS,
    as_guard_set,
    batch_unguarded,
    guarded_mask,
    is_theta_guarded,
    max_empty_cone,
    max_empty_cone_angle,
    max_empty_cone_angles,
    maximal_empty_cones,
    rasterize,
)

coord = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


def test_single_direction_is_full_turn():
    assert max_empty_cone_angle((0, 0), [(1, 0)]) == TWO_PI
    assert max_empty_cone_angle((0, 0), [(1, 0), (2, 0)]) == TWO_PI
    assert max_empty_cone_angle((0, 0), []) == TWO_PI


def test_threefold_symmetry():
    G = [(math.cos(a), math.sin(a)) for a in np.radians([90, 210, 330])]
    assert max_empty_cone_angle((0, 0), G) == pytest.approx(2 * math.pi / 3)


def test_three_guards_half_turn():
    # directions 0, pi/2, pi: gaps pi/2, pi/2, pi
    assert max_empty_cone_angle((0, 0), [(1, 0), (0, 1), (-1, 0)]) == pytest.approx(math.pi)


def test_guard_at_query_point_is_ignored():
    G = [(0, 0), (1, 0), (0, 1), (-1, 0), (0, -1)]
    assert max_empty_cone_angle((0, 0), G) == pytest.approx(math.pi / 2)


def test_square_center_boundary_convention():
    assert not is_theta_guarded((0.5, 0.5), SQUARE, math.pi / 2)
    assert is_theta_guarded((0.5, 0.5), SQUARE, math.pi / 2 + 0.01)


def test_lemma_empty_region_at_two_pi_over_n():
    rng = np.random.default_rng(0)
    for n in (3, 7, 20):
        G = rng.random((n, 2))
        P = rng.uniform(-0.5, 1.5, (2000, 2))
        assert not guarded_mask(P, G, 2 * math.pi / n).any()
        assert not any(is_theta_guarded(g, G, 2 * math.pi / n) for g in G)


def test_witness_is_empty_and_bounded_by_guards():
    rng = np.random.default_rng(1)
    G = as_guard_set(rng.random((15, 2)))
    for p in rng.uniform(-0.2, 1.2, (100, 2)):
        w = max_empty_cone(p, G)
        assert w.is_empty(G, tol=1e-12)
        assert w.extent == pytest.approx(max_empty_cone_angle(p, G))
        a_cw = math.atan2(w.g_max.y - p[1], w.g_max.x - p[0])
        a_ccw = math.atan2(w.g_min.y - p[1], w.g_min.x - p[0])
        assert _same_angle(a_cw, w.start)
        assert _same_angle(a_ccw, w.start + w.extent)


def _same_angle(a, b, tol=1e-9):
    d = (a - b) % TWO_PI
    return min(d, TWO_PI - d) < tol


def test_maximal_cones_at_square_corner():
    (w,) = maximal_empty_cones((0, 0), SQUARE, math.pi / 2)
    assert w.extent == pytest.approx(3 * math.pi / 2)
    assert w.g_min == Point(1, 0)  # counterclockwise end
    assert w.g_max == Point(0, 1)  # clockwise end


def test_maximal_cones_none_when_surrounded():
    G = [(0, 0)] + [(math.cos(a), math.sin(a)) for a in np.linspace(0, TWO_PI, 12, endpoint=False)]
    assert maximal_empty_cones((0, 0), G, math.pi / 3) == []


def test_maximal_cone_count_bound():
    rng = np.random.default_rng(2)
    G = as_guard_set(rng.random((40, 2)))
    for theta in (0.2, 0.5, 1.0, 2.0):
        for g in G.guards:
            assert len(maximal_empty_cones(g, G, theta)) <= math.floor(TWO_PI / theta)


def test_batch_square_corners_all_reported():
    got = batch_unguarded(SQUARE, SQUARE, math.pi / 3)
    assert [i for i, _ in got] == [0, 1, 2, 3]
    for _, w in got:
        assert w.extent == pytest.approx(3 * math.pi / 2)


def test_batch_center_agrees_with_oracle():
    got = batch_unguarded([(0.5, 0.5)], SQUARE, math.pi / 3)
    expect = [0] if not is_theta_guarded((0.5, 0.5), SQUARE, math.pi / 3) else []
    assert [i for i, _ in got] == expect == [0]


def test_batch_collinear_reports_everything():
    G = [(0, 0), (1, 1), (2, 2), (3, 3)]
    P = np.random.default_rng(3).uniform(-1, 4, (50, 2))
    for theta in (0.3, 1.0, 3.0):
        assert [i for i, _ in batch_unguarded(P, G, theta)] == list(range(50))


def _check_batch(P, G, theta):
    got = batch_unguarded(P, G, theta)
    mask = guarded_mask(P, G, theta)
    assert [i for i, _ in got] == list(np.nonzero(~mask)[0])
    for i, w in got:
        assert w.is_empty(G, tol=1e-12)
        assert w.extent >= theta - ANGLE_EPS
        assert w.extent == pytest.approx(max_empty_cone_angle(P[i], G), abs=1e-12)


def test_batch_equivalence_random():
    rng = np.random.default_rng(4)
    for k in range(6):
        n = int(rng.integers(3, 80))
        G = rng.random((n, 2))
        P = np.vstack([rng.uniform(-0.2, 1.2, (150, 2)), G[:10]])
        _check_batch(P, G, float(rng.uniform(0.1, 3.0)))


def test_batch_equivalence_lattice():
    xs = np.arange(5.0)
    G = np.array([(x, y) for x in xs for y in xs])
    P = np.array([(x / 2, y / 2) for x in range(-1, 10) for y in range(-1, 10)])
    for theta in (math.pi / 4, math.pi / 2, 2.0):
        _check_batch(P, G, theta)


@given(
    st.lists(st.tuples(coord, coord), min_size=1, max_size=12, unique=True),
    st.tuples(coord, coord),
    st.floats(0.05, TWO_PI),
    st.floats(0.05, TWO_PI),
)
def test_monotone_in_theta(G, p, t1, t2):
    lo, hi = min(t1, t2), max(t1, t2)
    if is_theta_guarded(p, G, lo):
        assert is_theta_guarded(p, G, hi)


@given(
    st.lists(st.tuples(coord, coord), min_size=2, max_size=12, unique=True),
    st.tuples(coord, coord),
    st.floats(0, TWO_PI),
    st.floats(0.1, 10),
    st.tuples(coord, coord),
    st.floats(0.1, 3.1),
)
def test_similarity_invariance(G, p, rot, scale, shift, theta):
    G = np.asarray(G, dtype=float)
    f = max_empty_cone_angle(p, G)
    assume(abs(f - theta) > 1e-6)
    c, s = math.cos(rot), math.sin(rot)
    M = scale * np.array([[c, -s], [s, c]])
    G2 = G @ M.T + shift
    p2 = M @ np.asarray(p) + shift
    assume(len({tuple(g) for g in G2}) == len(G2))
    assert is_theta_guarded(p2, G2, theta) == is_theta_guarded(p, G, theta)


def test_outside_hull_sees_half_turn():
    rng = np.random.default_rng(6)
    G = rng.random((25, 2))
    hull = convex_hull(G)
    P = rng.uniform(-1, 2, (3000, 2))
    outside = np.array([not hull.contains(p) for p in P])
    assert (max_empty_cone_angles(P[outside], G) >= math.pi - 1e-12).all()
    assert (max_empty_cone_angles(hull.vertices, G) >= math.pi - 1e-12).all()


def test_rasterize_examples():
    R = rasterize([(0, 0), (1, 0), (2, 0)], math.pi / 2, resolution=(20, 20))
    assert R.guarded.shape == (20, 20) and not R.guarded.any()
    bbox = ((0.0, 0.0), (1.0, 1.0))
    lo = rasterize(SQUARE, 0.9 * math.pi / 2, bbox, (3, 3))
    hi = rasterize(SQUARE, 1.1 * math.pi / 2, bbox, (3, 3))
    assert not lo.guarded[1, 1] and hi.guarded[1, 1]
    assert lo.f.size == 9


def test_rasterize_deterministic():
    G = random_guards(7, 30)
    a = rasterize(G, 1.0, resolution=(40, 30))
    b = rasterize(G, 1.0, resolution=(40, 30))
    assert np.array_equal(a.f, b.f)
