"""Arrangement of circular arcs and segments, face classification, region extraction.

The subdivision is built in four passes:

1. candidate pairs from a sort-and-sweep over bounding boxes,
2. all pairwise intersection points (vectorised for arc/arc pairs),
3. vertex snapping: points closer than the snap tolerance are merged,
4. every curve is split at its vertices and the pieces are linked into a
   half-edge structure by sorting the outgoing half-edges around each vertex
   (by tangent direction, ties by signed curvature).

Faces are the cycles of ``next``; each cycle is classified by probing a
point just to its left, and the region is the union of guarded faces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.spatial import cKDTree

from .errors import DegeneracyError
from .geometry import _TANGENT_GAP, TWO_PI, CircularArc, Point, arc_line_intersections
from .oracle import ANGLE_EPS, as_guard_set, batch_unguarded, max_empty_cone_angles
from .region import Edge, Region

REL_TOL = 1e-9


# ---------------------------------------------------------------------------
# Input curves


@dataclass(frozen=True)
class Segment:
    a: Point
    b: Point

    def bbox(self):
        return (min(self.a.x, self.b.x), min(self.a.y, self.b.y), max(self.a.x, self.b.x), max(self.a.y, self.b.y))


def _curve_bbox(c):
    return c.bbox()


def _param_point(c, t: float) -> Point:
    if isinstance(c, Segment):
        return Point(c.a.x + t * (c.b.x - c.a.x), c.a.y + t * (c.b.y - c.a.y))
    ang = c.start_angle + t
    return Point(c.center.x + c.radius * math.cos(ang), c.center.y + c.radius * math.sin(ang))


def _param_of(c, p) -> float:
    if isinstance(c, Segment):
        dx, dy = c.b.x - c.a.x, c.b.y - c.a.y
        return ((p[0] - c.a.x) * dx + (p[1] - c.a.y) * dy) / (dx * dx + dy * dy)
    off = (math.atan2(p[1] - c.center.y, p[0] - c.center.x) - c.start_angle) % TWO_PI
    # points just before the start wrap to ~2 pi; pull them back
    if off > c.sweep and off > 0.5 * (c.sweep + TWO_PI):
        off -= TWO_PI
    return off


def _end_param(c) -> float:
    return 1.0 if isinstance(c, Segment) else c.sweep


# ---------------------------------------------------------------------------
# Arrangement


@dataclass
class Arrangement:
    vertices: np.ndarray  # (V, 2)
    edges: list  # list[Edge], edge k owns half-edges 2k (forward) and 2k+1 (backward)
    origin: np.ndarray  # half-edge -> origin vertex
    nxt: np.ndarray  # half-edge -> next half-edge on the same face
    cycle: np.ndarray  # half-edge -> cycle id
    cycles: list  # list of half-edge lists
    cycle_area: np.ndarray
    component: np.ndarray  # cycle -> connected component id
    guarded: Optional[np.ndarray] = None  # cycle -> flag
    probes: Optional[np.ndarray] = None
    stats: dict = field(default_factory=dict)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def n_faces(self) -> int:
        """Bounded faces plus the single unbounded face."""
        return int(np.sum(self.cycle_area > 0)) + 1

    @property
    def complexity(self) -> int:
        return self.n_vertices + self.n_edges + self.n_faces

    def half_edge(self, h: int) -> Edge:
        e = self.edges[h >> 1]
        return e if h % 2 == 0 else e.reversed()

    def cycle_edges(self, c: int):
        return [self.half_edge(h) for h in self.cycles[c]]

    def euler_ok(self) -> bool:
        return bool(self.stats.get("euler_ok", False))


def _bbox_pairs(boxes: np.ndarray, pad: float):
    """Index pairs whose padded boxes overlap (sort-and-sweep on x)."""
    n = len(boxes)
    if n < 2:
        return np.zeros((0, 2), dtype=int)
    order = np.argsort(boxes[:, 0], kind="stable")
    b = boxes[order]
    xmin = b[:, 0]
    out = []
    ends = np.searchsorted(xmin, b[:, 2] + pad, side="right")
    for i in range(n):
        j1 = ends[i]
        if j1 <= i + 1:
            continue
        cand = np.arange(i + 1, j1)
        ok = (b[cand, 1] <= b[i, 3] + pad) & (b[cand, 3] >= b[i, 1] - pad)
        sel = cand[ok]
        if sel.size:
            out.append(np.column_stack([np.full(sel.size, i), sel]))
    if not out:
        return np.zeros((0, 2), dtype=int)
    pairs = np.concatenate(out)
    return np.sort(order[pairs], axis=1)


def _arc_arrays(arcs):
    return (
        np.array([[a.center.x, a.center.y] for a in arcs]).reshape(-1, 2),
        np.array([a.radius for a in arcs]),
        np.array([a.start_angle for a in arcs]),
        np.array([a.sweep for a in arcs]),
    )


def _arc_pairs_intersections(curves, pairs, tol):
    """Vectorised circle/circle intersections restricted to both arcs' spans.

    Returns a list of (i, j, x, y). Co-circular pairs are returned separately.
    """
    if len(pairs) == 0:
        return [], []
    C, R, S, W = _arc_arrays(curves)
    i, j = pairs[:, 0], pairs[:, 1]
    dx = C[j, 0] - C[i, 0]
    dy = C[j, 1] - C[i, 1]
    d = np.hypot(dx, dy)
    r1, r2 = R[i], R[j]
    same = (d <= tol) & (np.abs(r1 - r2) <= tol)
    concentric = d <= tol
    with np.errstate(divide="ignore", invalid="ignore"):
        a = (d * d + r1 * r1 - r2 * r2) / (2.0 * d)
        ux, uy = dx / d, dy / d
    far = (d > r1 + r2 + tol) | (d < np.abs(r1 - r2) - tol)
    ok = ~(concentric | far)
    h = np.sqrt(np.maximum(r1 * r1 - a * a, 0.0))
    # decide tangency on the half-chord: near-internal tangency still has two crossings
    gap = np.minimum(np.abs(d - (r1 + r2)), np.abs(d - np.abs(r1 - r2)))
    tangent = ok & ((h <= tol) | (gap <= _TANGENT_GAP * np.maximum(1.0, np.maximum(r1, r2))))
    a = np.where(tangent, np.clip(a, -r1, r1), a)
    h = np.where(tangent, 0.0, h)
    mx, my = C[i, 0] + a * ux, C[i, 1] + a * uy
    out = []
    for sgn in (1.0, -1.0):
        px = mx - sgn * h * uy
        py = my + sgn * h * ux
        valid = ok & ((sgn > 0) | ~tangent)
        for k_, c_ in ((i, 0), (j, 1)):
            ang = np.arctan2(py - C[k_, 1], px - C[k_, 0])
            off = np.mod(ang - S[k_], TWO_PI)
            atol = 10 * tol / R[k_]
            valid &= (off <= W[k_] + atol) | (off >= TWO_PI - atol)
        idx = np.nonzero(valid)[0]
        out.extend(zip(i[idx].tolist(), j[idx].tolist(), px[idx].tolist(), py[idx].tolist()))
    return out, pairs[np.nonzero(same)[0]].tolist()


def _seg_curve_intersections(c1, c2, tol):
    """Intersections involving at least one segment."""
    if isinstance(c1, Segment) and isinstance(c2, Segment):
        p, r = c1.a, (c1.b.x - c1.a.x, c1.b.y - c1.a.y)
        q, s = c2.a, (c2.b.x - c2.a.x, c2.b.y - c2.a.y)
        den = r[0] * s[1] - r[1] * s[0]
        if den == 0.0:
            out = []
            for e in (c2.a, c2.b):
                if _on_segment(c1, e, tol):
                    out.append(e)
            for e in (c1.a, c1.b):
                if _on_segment(c2, e, tol):
                    out.append(e)
            return out
        qp = (q.x - p.x, q.y - p.y)
        t = (qp[0] * s[1] - qp[1] * s[0]) / den
        u = (qp[0] * r[1] - qp[1] * r[0]) / den
        L1, L2 = math.hypot(*r), math.hypot(*s)
        if -tol / L1 <= t <= 1 + tol / L1 and -tol / L2 <= u <= 1 + tol / L2:
            return [Point(p.x + t * r[0], p.y + t * r[1])]
        return []
    seg, arc = (c1, c2) if isinstance(c1, Segment) else (c2, c1)
    return arc_line_intersections(arc, (seg.a, seg.b), tol / max(1.0, arc.radius), infinite=False)


def _on_segment(s: Segment, p, tol) -> bool:
    dx, dy = s.b.x - s.a.x, s.b.y - s.a.y
    L = math.hypot(dx, dy)
    t = ((p[0] - s.a.x) * dx + (p[1] - s.a.y) * dy) / (L * L)
    if t < -tol / L or t > 1 + tol / L:
        return False
    return abs((p[0] - s.a.x) * dy - (p[1] - s.a.y) * dx) / L <= tol


class _UnionFind:
    def __init__(self, n: int):
        self.p = list(range(n))

    def find(self, x: int) -> int:
        p = self.p
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, a: int, b: int):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if ra < rb:
                self.p[rb] = ra
            else:
                self.p[ra] = rb


def build_arrangement(
    curves: Sequence, tol: Optional[float] = None, check_euler: bool = True, rel_tol: float = REL_TOL
) -> Arrangement:
    """Planar subdivision induced by arcs (:class:`CircularArc`) and :class:`Segment` pieces.

    ``tol`` is the absolute snapping distance; by default ``rel_tol`` times the
    largest coordinate magnitude (at least 1).
    """
    curves = [c for c in curves if c is not None]
    if not curves:
        raise ValueError("arrangement needs at least one curve")
    boxes = np.array([_curve_bbox(c) for c in curves], dtype=float)
    scale = max(1.0, float(np.max(np.abs(boxes))))
    if tol is None:
        tol = rel_tol * scale

    # points: (x, y, curve, param, is_endpoint)
    px, py, pc, pt, pend = [], [], [], [], []

    def add(p, k, t, is_end):
        px.append(float(p[0]))
        py.append(float(p[1]))
        pc.append(k)
        pt.append(t)
        pend.append(is_end)

    for k, c in enumerate(curves):
        if isinstance(c, Segment):
            add(c.a, k, 0.0, True)
            add(c.b, k, 1.0, True)
        else:
            add(c.start, k, 0.0, True)
            add(c.end, k, c.sweep, True)

    pairs = _bbox_pairs(boxes, 2 * tol)
    is_arc = np.array([not isinstance(c, Segment) for c in curves])
    arc_ids = np.nonzero(is_arc)[0]
    both_arc = is_arc[pairs[:, 0]] & is_arc[pairs[:, 1]] if len(pairs) else np.zeros(0, dtype=bool)
    aa = pairs[both_arc]
    if len(aa):
        local = {int(g): l for l, g in enumerate(arc_ids)}
        loc_pairs = np.vectorize(local.__getitem__)(aa) if len(aa) else aa
        hits, cocircular = _arc_pairs_intersections([curves[g] for g in arc_ids], loc_pairs, tol)
        for li, lj, x, y in hits:
            gi, gj = int(arc_ids[li]), int(arc_ids[lj])
            add((x, y), gi, _param_of(curves[gi], (x, y)), False)
            add((x, y), gj, _param_of(curves[gj], (x, y)), False)
        for li, lj in cocircular:
            gi, gj = int(arc_ids[li]), int(arc_ids[lj])
            ci, cj = curves[gi], curves[gj]
            for src, dst, dk in ((ci, cj, gj), (cj, ci, gi)):
                for e in (src.start, src.end):
                    if dst.contains_point(e, 10 * tol / max(1.0, dst.radius)):
                        add(e, dk, _param_of(dst, e), False)
    for i, j in pairs[~both_arc]:
        for p in _seg_curve_intersections(curves[i], curves[j], tol):
            add(p, int(i), _param_of(curves[i], p), False)
            add(p, int(j), _param_of(curves[j], p), False)

    P = np.column_stack([px, py])
    pc = np.asarray(pc)
    pt = np.asarray(pt)
    pend = np.asarray(pend)

    # snap
    uf = _UnionFind(len(P))
    for a, b in cKDTree(P).query_pairs(r=tol * 10):
        uf.union(int(a), int(b))
    roots = np.array([uf.find(i) for i in range(len(P))])
    uniq, vid = np.unique(roots, return_inverse=True)
    V = np.zeros((len(uniq), 2))
    have = np.zeros(len(uniq), dtype=bool)
    # endpoints (exact guard coordinates) win as representatives
    for k in np.argsort(~pend, kind="stable"):
        v = vid[k]
        if not have[v]:
            V[v] = P[k]
            have[v] = True

    # split curves
    edges: list = []
    edge_keys: dict = {}
    by_curve: dict = {}
    for k in range(len(P)):
        by_curve.setdefault(int(pc[k]), []).append((float(pt[k]), int(vid[k])))
    for ci, lst in by_curve.items():
        c = curves[ci]
        end = _end_param(c)
        lst = [(min(max(t, 0.0), end), v) for t, v in lst]
        lst.sort()
        seq = []
        for t, v in lst:
            if seq and seq[-1][1] == v:
                continue
            seq.append((t, v))
        for (t0, u), (t1, v) in zip(seq, seq[1:]):
            if u == v or t1 - t0 <= 0.0:
                continue
            e = _make_edge(c, V[u], V[v], t0, t1)
            key = _edge_key(e, u, v, tol)
            if key in edge_keys:
                continue
            edge_keys[key] = len(edges)
            edges.append((u, v, e))

    return _link(V, edges, tol, check_euler)


def _make_edge(c, pu, pv, t0, t1) -> Edge:
    if isinstance(c, Segment):
        return Edge.segment(pu, pv)
    return Edge.arc(c.center, c.radius, pu, pv, ccw=True, sweep=t1 - t0)


def _edge_key(e: Edge, u: int, v: int, tol: float):
    a, b = (u, v) if u < v else (v, u)
    if not e.is_arc:
        return (a, b, "s")
    q = max(tol * 1e3, 1e-12)
    m = e.point_at(0.5)
    return (a, b, round(e.center.x / q), round(e.center.y / q), round(m.x / q), round(m.y / q))


def _tangent(e: Edge):
    """Outgoing direction angle and signed curvature at the start of ``e``."""
    if not e.is_arc:
        return math.atan2(e.end.y - e.start.y, e.end.x - e.start.x), 0.0
    a = math.atan2(e.start.y - e.center.y, e.start.x - e.center.x)
    if e.ccw:
        return a + math.pi / 2, 1.0 / e.radius
    return a - math.pi / 2, -1.0 / e.radius


def _order_near_tangent(hs, elist, v, ang, curv):
    """Order half-edges leaving ``v`` with almost equal tangents.

    Each is sampled at a common arc length (half the shortest of them), where
    the curves have separated far beyond the noise of the vertex position;
    the direction to that sample decides, then the signed curvature.
    """
    es = [elist[h >> 1] if h % 2 == 0 else elist[h >> 1].reversed() for h in hs]
    s = 0.5 * min(e.length() for e in es)
    base = float(ang[hs[0]])
    keys = []
    for h, e in zip(hs, es):
        q = e.point_at(s / e.length())
        rel = (math.atan2(q.y - v[1], q.x - v[0]) - base + math.pi) % TWO_PI - math.pi
        keys.append((rel, curv[h]))
    order = sorted(range(len(hs)), key=lambda k: keys[k])
    return [hs[k] for k in order]


def _link(V: np.ndarray, edges: list, tol: float, check_euler: bool) -> Arrangement:
    nE = len(edges)
    origin = np.zeros(2 * nE, dtype=int)
    elist = []
    ang = np.zeros(2 * nE)
    curv = np.zeros(2 * nE)
    for k, (u, v, e) in enumerate(edges):
        elist.append(e)
        origin[2 * k] = u
        origin[2 * k + 1] = v
        a0, k0 = _tangent(e)
        a1, k1 = _tangent(e.reversed())
        ang[2 * k], curv[2 * k] = a0 % TWO_PI, k0
        ang[2 * k + 1], curv[2 * k + 1] = a1 % TWO_PI, k1

    atol = 1e-7
    ang[ang > TWO_PI - atol] -= TWO_PI
    out_of: dict = {}
    for h in range(2 * nE):
        out_of.setdefault(int(origin[h]), []).append(h)
    pos = np.zeros(2 * nE, dtype=int)
    ring: dict = {}
    for v, hs in out_of.items():
        hs.sort(key=lambda h: ang[h])
        i = 0
        while i < len(hs):
            j = i + 1
            while j < len(hs) and ang[hs[j]] - ang[hs[j - 1]] <= atol:
                j += 1
            if j - i > 1:
                hs[i:j] = _order_near_tangent(hs[i:j], elist, V[v], ang, curv)
            i = j
        ring[v] = hs
        for p, h in enumerate(hs):
            pos[h] = p

    nxt = np.zeros(2 * nE, dtype=int)
    for h in range(2 * nE):
        t = h ^ 1
        v = origin[t]
        hs = ring[int(v)]
        nxt[h] = hs[(pos[t] - 1) % len(hs)]

    cycle = np.full(2 * nE, -1)
    cycles = []
    for h in range(2 * nE):
        if cycle[h] >= 0:
            continue
        cid = len(cycles)
        cur = []
        x = h
        while cycle[x] < 0:
            cycle[x] = cid
            cur.append(x)
            x = nxt[x]
        if x != h:
            raise DegeneracyError("inconsistent half-edge cycle", tuple(V[origin[h]]))
        cycles.append(cur)

    areas = np.zeros(len(cycles))
    for cid, hs in enumerate(cycles):
        s = 0.0
        for h in hs:
            e = elist[h >> 1]
            s += e.signed_area_term() if h % 2 == 0 else e.reversed().signed_area_term()
        areas[cid] = s

    # connected components over vertices
    uf = _UnionFind(len(V))
    for u, v, _ in edges:
        uf.union(u, v)
    comp_v = np.array([uf.find(i) for i in range(len(V))])
    comp_cycle = np.array([comp_v[origin[hs[0]]] for hs in cycles]) if cycles else np.zeros(0, dtype=int)
    used = np.zeros(len(V), dtype=bool)
    used[origin] = True
    euler_ok = True
    bad_at = None
    for c in np.unique(comp_cycle):
        nv = int(np.sum(used & (comp_v == c)))
        ne = int(sum(1 for u, _, _ in edges if comp_v[u] == c))
        nf = int(np.sum(comp_cycle == c))
        if nv - ne + nf != 2:
            euler_ok = False
            bad_at = tuple(V[np.nonzero(comp_v == c)[0][0]])
    arr = Arrangement(V, elist, origin, nxt, cycle, cycles, areas, comp_cycle)
    arr.stats = {
        "V": int(used.sum()),
        "E": nE,
        "F": arr.n_faces,
        "mu": int(used.sum()) + nE + arr.n_faces,
        "psi": arr.n_faces,
        "components": int(len(np.unique(comp_cycle))),
        "euler_ok": euler_ok,
    }
    if check_euler and not euler_ok:
        raise DegeneracyError("Euler characteristic check failed", bad_at)
    return arr


# ---------------------------------------------------------------------------
# Classification


def _edge_arrays(edges: list):
    n = len(edges)
    kind = np.array([e.is_arc for e in edges], dtype=bool)
    A = np.array([[e.start.x, e.start.y] for e in edges]).reshape(n, 2)
    B = np.array([[e.end.x, e.end.y] for e in edges]).reshape(n, 2)
    Cc = np.array([[e.center.x, e.center.y] if e.is_arc else [0.0, 0.0] for e in edges]).reshape(n, 2)
    R = np.array([e.radius if e.is_arc else 0.0 for e in edges])
    S = np.zeros(n)
    W = np.zeros(n)
    for k, e in enumerate(edges):
        if e.is_arc:
            a = e.as_ccw_arc()
            S[k], W[k] = a.start_angle, a.sweep
    boxes = np.array([e.bbox() for e in edges]).reshape(n, 4)
    return kind, A, B, Cc, R, S, W, boxes


def _dist_to_edges(p, idx, arrays) -> np.ndarray:
    kind, A, B, Cc, R, S, W, _ = arrays
    x, y = p
    out = np.empty(len(idx))
    k = kind[idx]
    si = idx[~k]
    if si.size:
        ax, ay = A[si, 0], A[si, 1]
        dx, dy = B[si, 0] - ax, B[si, 1] - ay
        L2 = np.maximum(dx * dx + dy * dy, 1e-300)
        t = np.clip(((x - ax) * dx + (y - ay) * dy) / L2, 0, 1)
        out[~k] = np.hypot(x - ax - t * dx, y - ay - t * dy)
    ai = idx[k]
    if ai.size:
        cx, cy = Cc[ai, 0], Cc[ai, 1]
        ang = np.arctan2(y - cy, x - cx)
        off = np.mod(ang - S[ai], TWO_PI)
        on = off <= W[ai]
        rad = np.abs(np.hypot(x - cx, y - cy) - R[ai])
        # the counterclockwise arc's endpoints
        e0x, e0y = cx + R[ai] * np.cos(S[ai]), cy + R[ai] * np.sin(S[ai])
        e1x, e1y = cx + R[ai] * np.cos(S[ai] + W[ai]), cy + R[ai] * np.sin(S[ai] + W[ai])
        ends = np.minimum(np.hypot(x - e0x, y - e0y), np.hypot(x - e1x, y - e1y))
        out[k] = np.where(on, rad, ends)
    return out


def _probe(arr: Arrangement, h: int, arrays):
    """A point just left of half-edge ``h`` and its clearance from other edges."""
    e = arr.half_edge(h)
    m = e.point_at(0.5)
    if e.is_arc:
        nx, ny = e.center.x - m.x, e.center.y - m.y
        L = math.hypot(nx, ny)
        nx, ny = (nx / L, ny / L) if e.ccw else (-nx / L, -ny / L)
        limit = e.radius
    else:
        dx, dy = e.end.x - e.start.x, e.end.y - e.start.y
        L = math.hypot(dx, dy)
        nx, ny = -dy / L, dx / L
        limit = math.inf
    rho = 0.5 * min(e.length(), math.dist(e.start, e.end) if e.start != e.end else e.length())
    boxes = arrays[-1]
    near = np.nonzero(
        (boxes[:, 0] <= m.x + rho) & (boxes[:, 2] >= m.x - rho) & (boxes[:, 1] <= m.y + rho) & (boxes[:, 3] >= m.y - rho)
    )[0]
    near = near[near != (h >> 1)]
    clear = rho
    if near.size:
        clear = min(clear, float(np.min(_dist_to_edges(m, near, arrays))))
    delta = 0.3 * min(clear, limit)
    return Point(m.x + delta * nx, m.y + delta * ny), clear


def face_probes(arr: Arrangement, per_cycle: int = 2):
    """Up to ``per_cycle`` probe points per cycle, from its longest edges."""
    arrays = _edge_arrays(arr.edges)
    probes = []
    for cid, hs in enumerate(arr.cycles):
        order = sorted(hs, key=lambda h: -arr.edges[h >> 1].length())
        pts = []
        for h in order[: max(per_cycle * 3, per_cycle)]:
            p, c = _probe(arr, h, arrays)
            pts.append((c, p))
        pts.sort(key=lambda t: -t[0])
        probes.append([p for _, p in pts[:per_cycle]])
    return probes


def classify_faces(arr: Arrangement, G, theta: float, backend: str = "oracle", window=None) -> Arrangement:
    """Flag every cycle by testing probe points against the guards.

    Two probes per cycle are taken from the edges with the most clearance. If
    they disagree, the one farther from the theta threshold wins unless both are
    clearly decided, in which case the face is reported as degenerate.
    """
    G = as_guard_set(G)
    probes = face_probes(arr, 2)
    flat = []
    owner = []
    for cid, ps in enumerate(probes):
        for p in ps:
            flat.append(p)
            owner.append(cid)
    P = np.asarray(flat, dtype=float).reshape(-1, 2)
    owner = np.asarray(owner)
    f = max_empty_cone_angles(P, G)
    if backend == "batch" and 0.0 < theta < math.pi:
        ung = {i for i, _ in batch_unguarded(P, G, theta)}
        flags = np.array([i not in ung for i in range(len(P))], dtype=bool)
    elif backend in ("oracle", "batch"):
        flags = f < theta - ANGLE_EPS
    else:
        raise ValueError(f"unknown classification backend {backend!r}")
    if window is not None:
        (x0, y0), (x1, y1) = window
        flags &= (P[:, 0] > x0) & (P[:, 0] < x1) & (P[:, 1] > y0) & (P[:, 1] < y1)
    guarded = np.zeros(len(arr.cycles), dtype=bool)
    rep = np.zeros((len(arr.cycles), 2))
    margin = np.abs(f - theta)
    for cid in range(len(arr.cycles)):
        ks = np.nonzero(owner == cid)[0]
        vals = flags[ks]
        best = ks[int(np.argmax(margin[ks]))]
        if vals.min() != vals.max():
            decided = margin[ks] > 1e-6
            if decided.all():
                raise DegeneracyError("face probes disagree", tuple(P[ks[0]]))
        guarded[cid] = flags[best]
        rep[cid] = P[best]
    # nothing outside the hull is guarded for theta < pi: the unbounded side stays unguarded
    arr.guarded = guarded
    arr.probes = rep
    return arr


# ---------------------------------------------------------------------------
# Extraction


def extract_region(arr: Arrangement, theta: Optional[float] = None) -> Region:
    """Boundary chains of the union of guarded faces, guarded side on the left."""
    if arr.guarded is None:
        raise ValueError("classify the arrangement first")
    g = arr.guarded
    cyc = arr.cycle
    nH = len(cyc)
    boundary = np.array([g[cyc[h]] and not g[cyc[h ^ 1]] for h in range(nH)], dtype=bool)
    seen = np.zeros(nH, dtype=bool)
    chains = []
    for h0 in np.nonzero(boundary)[0]:
        if seen[h0]:
            continue
        chain = []
        h = int(h0)
        for _ in range(nH + 1):
            seen[h] = True
            chain.append(arr.half_edge(h))
            n = int(arr.nxt[h])
            guard = 0
            while not boundary[n]:
                n = int(arr.nxt[n ^ 1])
                guard += 1
                if guard > nH:
                    raise DegeneracyError("boundary walk does not close", tuple(arr.vertices[arr.origin[h]]))
            h = n
            if h == h0:
                break
        else:
            raise DegeneracyError("boundary walk does not close", tuple(arr.vertices[arr.origin[h0]]))
        chains.append(tuple(chain))
    chains.sort(key=lambda c: (round(c[0].start.x, 12), round(c[0].start.y, 12)))
    return Region(tuple(chains), theta)


# ---------------------------------------------------------------------------
# Pipeline


def window_segments(window) -> list:
    (x0, y0), (x1, y1) = window
    cs = [Point(x0, y0), Point(x1, y0), Point(x1, y1), Point(x0, y1)]
    return [Segment(cs[i], cs[(i + 1) % 4]) for i in range(4)]


def clip_arcs(arcs, window) -> list:
    """Pieces of the arcs lying inside the closed window."""
    (x0, y0), (x1, y1) = window
    out = []
    for a in arcs:
        bx0, by0, bx1, by1 = a.bbox()
        if bx1 < x0 or bx0 > x1 or by1 < y0 or by0 > y1:
            continue
        if bx0 >= x0 and bx1 <= x1 and by0 >= y0 and by1 <= y1:
            out.append(a)
            continue
        cuts = [0.0, a.sweep]
        for s in window_segments(window):
            for p in arc_line_intersections(a, (s.a, s.b), 1e-12, infinite=False):
                t = _param_of(a, p)
                if 0.0 < t < a.sweep:
                    cuts.append(t)
        cuts.sort()
        for t0, t1 in zip(cuts, cuts[1:]):
            if t1 - t0 <= 1e-14:
                continue
            m = _param_point(a, 0.5 * (t0 + t1))
            if x0 <= m.x <= x1 and y0 <= m.y <= y1:
                ps, pe = _param_point(a, t0), _param_point(a, t1)
                if t0 == 0.0:
                    ps = a.start
                if t1 == a.sweep:
                    pe = a.end
                out.append(CircularArc(a.center, a.radius, (a.start_angle + t0) % TWO_PI, t1 - t0, ps, pe, a.provenance))
    return out


def region_theta_lt_pi(
    G,
    theta: float,
    tangent_backend: str = "naive",
    classify_backend: str = "oracle",
    window=None,
    r: int = 8,
    return_arrangement: bool = False,
    rel_tol: float = REL_TOL,
):
    """The theta-region for ``0 < theta < pi``: candidate arcs -> arrangement -> classification -> boundary."""
    from .arcgen import generate_candidate_arcs

    G = as_guard_set(G)
    cand = generate_candidate_arcs(G, theta, tangent_backend, r)
    meta = {"arcs": len(cand)}
    if cand.provably_empty or not cand.arcs:
        reg = Region((), theta, False, meta)
        return (reg, None, cand) if return_arrangement else reg
    curves = list(cand.arcs)
    if window is not None:
        curves = clip_arcs(curves, window) + window_segments(window)
    arr = build_arrangement(curves, rel_tol=rel_tol)
    classify_faces(arr, G, theta, classify_backend, window)
    reg = extract_region(arr, theta)
    meta.update(arr.stats)
    reg = Region(reg.chains, theta, False, meta)
    return (reg, arr, cand) if return_arrangement else reg
