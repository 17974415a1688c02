"""The ten acceptance criteria at their stated tolerances."""

import math
import time

import numpy as np

from conftest import record
from thetaguard.arcgen import generate_candidate_arcs
from thetaguard.geometry import convex_hull
from thetaguard.lowerbound import generate, verify_fragmentation
from thetaguard.oracle import batch_unguarded, guarded_mask, padded_bbox, rasterize
from thetaguard.partition import HalfPlane, Key, PartitionTree
from thetaguard.pipeline import theta_region
from thetaguard.report import loglog_slope, pgm_text, write_raster_svg, write_region_svg


def grid_centers(bbox, cols, rows):
    (x0, y0), (x1, y1) = bbox
    xs = x0 + (np.arange(cols) + 0.5) * (x1 - x0) / cols
    ys = y0 + (np.arange(rows) + 0.5) * (y1 - y0) / rows
    X, Y = np.meshgrid(xs, ys)
    return np.column_stack([X.ravel(), Y.ravel()])


def in_hull(P, hull):
    v = np.asarray(hull.vertices, dtype=float)
    w = np.roll(v, -1, axis=0)
    inside = np.ones(len(P), dtype=bool)
    for a, b in zip(v, w):
        inside &= (b[0] - a[0]) * (P[:, 1] - a[1]) - (b[1] - a[1]) * (P[:, 0] - a[0]) > 0
    return inside


def test_c1_pi_region_is_hull():
    t0 = time.time()
    worst = 0.0
    for seed in range(20):
        rng = np.random.default_rng(seed)
        G = rng.random((int(rng.integers(3, 41)), 2))
        R = theta_region(G, math.pi)
        hull = convex_hull(map(tuple, G))
        lo, hi = G.min(axis=0), G.max(axis=0)
        P = rng.uniform(lo, hi, (100_000, 2))
        box = float(np.prod(hi - lo))
        diff = np.count_nonzero(R.contains(P) != in_hull(P, hull)) / len(P) * box
        worst = max(worst, diff / hull.area())
    dt = time.time() - t0
    record("1 pi-region = hull", worst < 1e-6 and dt < 10, f"max rel sym-diff {worst:.2e}, {dt:.1f}s")


def test_c2_two_guard_thales_disk():
    worst = 0.0
    rng = np.random.default_rng(7)
    for _ in range(10):
        l, r = rng.uniform(-5, 5, (2, 2))
        R = theta_region([l, r], 1.5 * math.pi)
        c, rad = (l + r) / 2, np.linalg.norm(r - l) / 2
        B = R.sample_boundary(64)
        t = np.linspace(0, 2 * math.pi, 2048, endpoint=False)
        C = c + rad * np.column_stack([np.cos(t), np.sin(t)])
        h = max(np.abs(np.hypot(*(B - c).T) - rad).max(), R.boundary_distance(C).max())
        worst = max(worst, h / (2 * rad))
    record("2 two-guard 3pi/2-region = Thales disk", worst < 1e-6, f"max Hausdorff/|lr| {worst:.2e}")


def test_c3_two_pi_over_n_is_empty():
    bad = []
    for seed in range(50):
        rng = np.random.default_rng(1000 + seed)
        n = int(rng.integers(3, 101))
        G = rng.random((n, 2))
        theta = 2 * math.pi / n
        try:
            R = theta_region(G, theta)
            P = rng.uniform(-0.2, 1.2, (10_000, 2))
            if not R.is_empty or guarded_mask(P, G, theta).any():
                bad.append(seed)
        except Exception as exc:  # any exception fails the criterion
            bad.append(f"{seed}:{type(exc).__name__}")
    record("3 theta=2pi/n gives empty region", not bad, f"failures {bad}" if bad else "50/50 empty")


def test_c4_oracle_agreement_grid():
    thetas = [math.pi * k / 6 for k in (1, 2, 3, 4, 5, 7, 9)]
    t0 = time.time()
    bad = []
    for seed in range(30):
        rng = np.random.default_rng(2000 + seed)
        G = rng.random((int(rng.integers(3, 61)), 2))
        bbox = padded_bbox(G)
        P = grid_centers(bbox, 200, 200)
        (x0, y0), (x1, y1) = bbox
        diag = math.hypot((x1 - x0) / 200, (y1 - y0) / 200)
        for theta in thetas:
            R = theta_region(G, theta)
            keep = R.boundary_distance(P) > diag if R.chains else np.ones(len(P), dtype=bool)
            Q = P[keep]
            miss = np.count_nonzero(R.contains(Q) != guarded_mask(Q, G, theta))
            if miss:
                bad.append((seed, round(theta, 4), miss))
    dt = time.time() - t0
    ok = not bad and dt < 300
    record("4 oracle agreement on 200x200 grids", ok, f"{30 * len(thetas)} cases, mismatches {bad}, {dt:.0f}s")


def test_c5_candidate_arc_scaling():
    ns = [100, 200, 400, 800]
    over_budget = 0

    def arcs(n, theta, seeds=3):
        nonlocal over_budget
        total = 0
        for s in range(seeds):
            C = generate_candidate_arcs(np.random.default_rng(3000 + s).random((n, 2)), theta)
            budget = 2 * math.floor(2 * math.pi / theta)
            over_budget += sum(v > budget for v in C.self_endpoints.values())
            total += len(C)
        return total / seeds

    counts = [arcs(n, math.pi / 2) for n in ns]
    slope = loglog_slope(ns, counts)
    thetas = [math.pi / 2, math.pi / 4, math.pi / 8, math.pi / 16]
    scaled = [arcs(200, t) * t for t in thetas]
    band = max(scaled) / min(scaled)
    ok = slope <= 1.1 and band <= 3 and over_budget == 0
    record(
        "5 |C'| = O(n/theta)",
        ok,
        f"slope {slope:.3f}, |C'|*theta band {band:.2f}, budget violations {over_budget}",
    )


def test_c6_fragmentation():
    got = {}
    t2 = 0.0
    for i in (1, 2):
        t0 = time.time()
        inst = generate(i)
        raster = verify_fragmentation(inst, "raster")
        arr = verify_fragmentation(inst, "arrangement")
        if i == 2:
            t2 = time.time() - t0
        got[i] = (inst.n, raster, arr)
    ok = got[1] == (92, 9, 9) and got[2] == (188, 25, 25) and t2 < 300
    record("6 fragmentation (2i+1)^2", ok, f"(guards, raster, arrangement) {got}, i=2 in {t2:.0f}s")


def test_c7_partition_tree_exact():
    rng = np.random.default_rng(4)
    n = 100_000
    P = rng.random((n, 2))
    T = PartitionTree(P, r=8)
    mism, visits = 0, []
    for _ in range(10_000):
        a = rng.random(2)
        ang = rng.uniform(0, 2 * math.pi)
        hp = HalfPlane(tuple(a), (a[0] + math.cos(ang), a[1] + math.sin(ang)), rng.choice(["left", "right"]))
        phi = rng.uniform(0, 2 * math.pi)
        d = (math.cos(phi), math.sin(phi))
        got = T.extreme([hp], d)
        visits.append(T.last_visits)
        ok = hp.mask(P)
        want = int(np.nonzero(ok)[0][Key(d).best(P[ok])]) if ok.any() else None
        mism += got != want
    same = 0
    for seed in range(20):
        g = np.random.default_rng(5000 + seed)
        G = g.random((int(g.integers(10, 80)), 2))
        theta = float(g.uniform(0.3, 2.8))
        same += generate_candidate_arcs(G, theta, "naive").signature() == generate_candidate_arcs(
            G, theta, "partition-tree"
        ).signature()
    med = float(np.median(visits))
    ok = mism == 0 and same == 20
    record(
        "7 partition tree = naive scan",
        ok,
        f"{mism} query mismatches, {same}/20 identical arc sets, median visits {med:.0f} of n={n}",
    )


def test_c8_batched_classification():
    bad, witnesses = [], 0
    for seed in range(20):
        rng = np.random.default_rng(6000 + seed)
        G = rng.random((int(rng.integers(3, 201)), 2))
        P = rng.uniform(-0.3, 1.3, (int(rng.integers(1, 501)), 2))
        theta = float(rng.uniform(0.1, 2 * math.pi - 0.1))
        got = batch_unguarded(P, G, theta)
        want = list(np.nonzero(~guarded_mask(P, G, theta))[0])
        if [i for i, _ in got] != want:
            bad.append(seed)
        for _, w in got:
            witnesses += 1
            if not (w.is_empty(G) and w.extent >= theta - 1e-9):
                bad.append((seed, "witness"))
    record("8 batch_unguarded = oracle", not bad, f"failures {bad}, {witnesses} witnesses checked")


def test_c9_boundary_complexity_linear():
    ns = [50, 100, 200, 400]
    sizes = []
    for n in ns:
        sizes.append(np.mean([theta_region(np.random.default_rng(7000 + s).random((n, 2)), 2.0).edge_count for s in range(3)]))
    slope = loglog_slope(ns, sizes)
    record("9 boundary complexity O(n) at theta=2", slope <= 1.15, f"slope {slope:.3f}, sizes {[round(s) for s in sizes]}")


def test_c10_disconnected_region(tmp_path):
    G = np.random.default_rng(2024).random((50, 2))
    found = None
    for theta in np.linspace(0.3, math.pi - 0.05, 40):
        R = theta_region(G, float(theta))
        if len(R.components) >= 2:
            found = (float(theta), len(R.components))
            break
    if found:
        svg = tmp_path / "region.svg"
        write_region_svg(str(svg), R, G, title=f"theta={found[0]:.3f}")
        r = rasterize(G, found[0], resolution=(200, 200))
        write_raster_svg(str(tmp_path / "f.svg"), r, G)
        (tmp_path / "f.pgm").write_text(pgm_text(r))
        produced = svg.stat().st_size > 0 and (tmp_path / "f.pgm").stat().st_size > 0
    ok = bool(found) and produced
    record("10 disconnected region below pi", ok, f"theta, components = {found}")
