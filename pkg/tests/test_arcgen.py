import math

import numpy as np
import pytest

from conftest import SQUARE, random_guards
from thetaguard.arcgen import (
    find_tangent_guard,
    generate_candidate_arcs,
    make_backend,
    merge_cocircular,
    trace_tunnel,
)
from thetaguard.errors import PreconditionError
from thetaguard.geometry import Point, angle_at, direction, inscribed_arc
from thetaguard.oracle import ConeWitness, maximal_empty_cones, rasterize
from thetaguard.pipeline import theta_region
from thetaguard.region import Edge, Region


def boundary_cells(G, theta, resolution=150):
    """Centers of raster cells with a guarded/unguarded neighbour pair, and the cell diagonal."""
    R = rasterize(G, theta, resolution=(resolution, resolution))
    g = R.guarded
    b = np.zeros_like(g)
    b[:-1, :] |= g[:-1, :] != g[1:, :]
    b[1:, :] |= g[:-1, :] != g[1:, :]
    b[:, :-1] |= g[:, :-1] != g[:, 1:]
    b[:, 1:] |= g[:, :-1] != g[:, 1:]
    X, Y = R.centers()
    return np.column_stack([X[b], Y[b]]), math.hypot(*R.cell_size)


def arc_distance(P, arcs):
    d = np.full(len(P), np.inf)
    for a in arcs:
        np.minimum(d, Region(((Edge.from_arc(a),),)).boundary_distance(P), out=d)
    return d


def uncovered(G, theta, arcs, resolution=150):
    P, diag = boundary_cells(G, theta, resolution)
    if len(P) == 0:
        return []
    return P[arc_distance(P, arcs) > diag].tolist()


def test_square_plus_center():
    G = SQUARE + [(0.5, 0.5)]
    theta = math.pi / 2 - 0.2
    C = generate_candidate_arcs(G, theta)
    assert C.stats["hull-edge"] == 4
    # the center guard has four gaps of pi/2 >= theta
    assert len([a for a in C.arcs if Point(0.5, 0.5) in (a.provenance.l, a.provenance.r)]) >= 4
    assert uncovered(G, theta, C.arcs) == []


def test_equilateral_triangle_below_threshold_is_empty():
    G = [(0, 0), (1, 0), (0.5, math.sqrt(3) / 2)]
    theta = 2 * math.pi / 3 - 0.1
    C = generate_candidate_arcs(G, theta)
    assert C.stats["hull-edge"] == 3
    assert theta_region(G, theta).is_empty
    R = rasterize(G, theta, resolution=(100, 100))
    assert not R.guarded.any()


def test_collinear_is_flagged_empty():
    C = generate_candidate_arcs([(0, 0), (1, 1), (2, 2)], 1.0)
    assert C.provably_empty and not C.arcs


def test_theta_two_pi_over_n_gives_empty_region():
    G = random_guards(3, 12)
    assert theta_region(G, 2 * math.pi / 12).is_empty


def test_tangent_guard_example():
    G = [(0, 0), (4, 0), (2, 3)]
    g, apex = find_tangent_guard((0, 0), (4, 0), math.pi / 4, "left", G)
    assert g == Point(2, 3)
    assert apex.x == pytest.approx(-1.0) and apex.y == pytest.approx(0.0)
    assert find_tangent_guard((0, 0), (4, 0), math.pi / 4, "right", G) is None


def test_tangent_guard_rejects_nonempty_cone():
    G = [(0, 0), (4, 0), (2, 0.5)]
    with pytest.raises(PreconditionError):
        find_tangent_guard((0, 0), (4, 0), math.pi / 4, "left", G)


def test_tangent_guard_backends_agree():
    rng = np.random.default_rng(0)
    G = rng.random((300, 2))
    naive, tree = make_backend(G, "naive"), make_backend(G, "partition-tree")
    checked = 0
    while checked < 1000:
        g = G[rng.integers(len(G))]
        theta = float(rng.uniform(0.1, 3.0))
        # queries as issued by the arc generator: anchored on a maximal cone's witness
        for cone in maximal_empty_cones(g, G, theta):
            for anchor, side in ((cone.g_min, "right"), (cone.g_max, "left")):
                a = find_tangent_guard(g, anchor, theta, side, G, naive)
                assert a == find_tangent_guard(g, anchor, theta, side, G, tree)
                checked += 1


@pytest.mark.parametrize("seed", range(4))
def test_backends_give_identical_arcs(seed):
    G = random_guards(seed, 60)
    for theta in (0.4, 1.3):
        a = generate_candidate_arcs(G, theta, "naive")
        b = generate_candidate_arcs(G, theta, "partition-tree")
        assert a.signature() == b.signature()


@pytest.mark.parametrize("seed", range(5))
def test_arcs_have_inscribed_angle_theta(seed):
    rng = np.random.default_rng(seed)
    G = rng.random((30, 2))
    theta = float(rng.uniform(0.3, 2.8))
    for a in generate_candidate_arcs(G, theta).arcs:
        prov = a.provenance
        assert prov.angle == theta
        for p in a.sample(5)[1:-1]:
            assert angle_at(p, prov.l, prov.r) == pytest.approx(theta, abs=1e-8)


@pytest.mark.parametrize("seed", range(6))
def test_coverage_and_budget(seed):
    rng = np.random.default_rng(100 + seed)
    G = rng.random((int(rng.integers(5, 60)), 2))
    for theta in (math.pi / 6, math.pi / 3, math.pi / 2, 2 * math.pi / 3, 5 * math.pi / 6):
        C = generate_candidate_arcs(G, theta)
        assert uncovered(G, theta, C.arcs, 120) == []
        budget = 2 * math.floor(2 * math.pi / theta)
        assert all(v <= budget for v in C.self_endpoints.values())


def test_merge_cocircular_unions_overlaps():
    full = inscribed_arc((0, 0), (1, 0), 1.0)
    a = full.sub_arc(full.point_at(0.0), full.point_at(0.6))
    b = full.sub_arc(full.point_at(0.4), full.point_at(1.0))
    (m,) = merge_cocircular([a, b])
    assert m.sweep == pytest.approx(full.sweep)
    far = inscribed_arc((5, 5), (6, 5), 1.0)
    assert len(merge_cocircular([a, far])) == 2


def _funnel():
    G = [(-1, 2), (1, 2), (-2, 4), (2.5, 4), (0, -3)]
    theta = 0.9
    apex = Point(0, 2 - 1 / math.tan(theta / 2))
    start = ConeWitness(apex, direction(apex, (1, 2)), theta, Point(-1, 2), Point(1, 2))
    return G, theta, start


def test_tunnel_pair_count():
    G, theta, start = _funnel()
    T = trace_tunnel(start, G, theta)
    assert T.check_pair_count()
    assert len(T.right) == 2 and T.right[-1] == Point(2.5, 4)


def test_tunnel_region_is_convex():
    G, theta, start = _funnel()
    T = trace_tunnel(start, G, theta)
    pts = np.vstack([np.asarray(a.sample(20)) for a in T.arcs])
    # midpoints of boundary samples see every recorded pair at >= theta
    rng = np.random.default_rng(0)
    for _ in range(200):
        p, q = pts[rng.integers(len(pts), size=2)]
        m = 0.5 * (p + q)
        for l, r in T.pairs:
            assert angle_at(m, l, r) >= theta - 1e-9


def test_tunnel_arcs_are_covered_by_candidates():
    G, theta, start = _funnel()
    T = trace_tunnel(start, G, theta)
    C = generate_candidate_arcs(G, theta)
    for a in T.arcs:
        assert (arc_distance(np.asarray(a.sample(9)), C.arcs) < 1e-7).all()
