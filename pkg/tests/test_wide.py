import math

import numpy as np
import pytest

from conftest import SQUARE, random_guards
from thetaguard.errors import GeometryError
from thetaguard.geometry import TWO_PI, angle_at, convex_hull
from thetaguard.oracle import guarded_mask, padded_bbox, rasterize
from thetaguard.wide import region_theta_ge_pi


def test_pi_region_is_hull():
    G = random_guards(0, 25)
    R = region_theta_ge_pi(G, math.pi)
    hull = convex_hull(G)
    (chain,) = R.chains
    assert [e.start for e in chain] == list(hull.vertices)
    assert R.area() == pytest.approx(hull.area())


def test_two_guards_three_half_pi_is_thales_disk():
    R = region_theta_ge_pi([(0, 0), (1, 0)], 1.5 * math.pi)
    assert R.arc_count == 2
    pts = R.sample_boundary(200)
    assert np.abs(np.hypot(pts[:, 0] - 0.5, pts[:, 1]) - 0.5).max() < 1e-12
    assert R.area() == pytest.approx(math.pi / 4)


def test_collinear_is_a_lens():
    G = [(0, 0), (1, 0), (3, 0)]
    R = region_theta_ge_pi(G, 1.7 * math.pi)
    phi = TWO_PI - 1.7 * math.pi
    for p in R.sample_boundary(50):
        if min(math.dist(p, (0, 0)), math.dist(p, (3, 0))) > 1e-9:
            assert angle_at(p, (0, 0), (3, 0)) == pytest.approx(phi, abs=1e-9)
    assert region_theta_ge_pi(G, math.pi).is_empty


def test_square_bulges_match_raster():
    theta = 1.5 * math.pi
    R = region_theta_ge_pi(SQUARE, theta)
    ras = rasterize(SQUARE, theta, ((-0.6, -0.6), (1.6, 1.6)), (400, 400))
    X, Y = ras.centers()
    P = np.column_stack([X.ravel(), Y.ravel()])
    diag = math.hypot(*ras.cell_size)
    far = R.boundary_distance(P) > diag
    assert np.array_equal(R.contains(P[far]), ras.guarded.ravel()[far])


@pytest.mark.parametrize("seed", range(8))
def test_random_wide_properties(seed):
    rng = np.random.default_rng(seed)
    G = rng.random((int(rng.integers(3, 40)), 2))
    theta = float(rng.uniform(math.pi + 0.05, TWO_PI - 0.05))
    R = region_theta_ge_pi(G, theta)
    hull = convex_hull(G)
    # each ray of the rotating wedge passes every hull edge direction once
    assert len(hull) <= R.arc_count <= 2 * len(hull)
    assert len(R.components) == 1 and not R.holes and R.check_closed()
    # every boundary arc sees its chord at 2 pi - theta
    for e in R.edges():
        for p in e.sample(5)[1:-1]:
            seen = [angle_at(p, a, b) for a in hull.vertices for b in hull.vertices if a != b and p not in (a, b)]
            assert max(seen) == pytest.approx(TWO_PI - theta, abs=1e-8)
    # the hull lies inside
    inner = np.array([np.mean(hull.vertices, axis=0)])
    assert R.contains(inner).all()
    # oracle agreement away from the boundary
    (x0, y0), (x1, y1) = padded_bbox(G, 1.0)
    P = rng.uniform((x0, y0), (x1, y1), (4000, 2))
    far = R.boundary_distance(P) > 1e-7
    assert np.array_equal(R.contains(P[far]), guarded_mask(P[far], G, theta))


def test_rejects_bad_theta():
    with pytest.raises(GeometryError):
        region_theta_ge_pi(SQUARE, 1.0)
    assert region_theta_ge_pi(SQUARE, TWO_PI).whole_plane
