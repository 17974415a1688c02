"""Simplicial partition tree for half-plane extreme-point queries.

Each node owns a triangle and the points inside it. A node is split by
repeated bisection: the triangle is cut along a ray from one corner through
the angular median of its points, ``log2(r)`` times, which yields ``r``
children whose sizes differ by at most one. Every node stores the convex hull
of its points so a node lying entirely inside the query half-plane is
answered by a binary search on that hull.

Queries accept a conjunction of open half-planes. A node is pruned when some
half-plane misses its hull, answered from the hull when every half-plane
contains it, and refined otherwise. Leaves are scanned with exact
orientation tests, so results equal a linear scan with the same key.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .geometry import TWO_PI, Point, convex_hull, orient

# a hull test this close to the line is refined instead of trusted
_MARGIN = 1e-9
# hulls this small are scanned directly instead of binary searched
_SMALL_HULL = 24


@dataclass
class Node:
    triangle: tuple  # three Points
    idx: np.ndarray  # indices into the tree's point array
    hull: np.ndarray  # (k, 2) hull vertices, counterclockwise, collinear points kept
    hull_idx: np.ndarray
    edge_angles: np.ndarray  # unwrapped, nondecreasing
    children: list = field(default_factory=list)
    extent: float = 1.0  # 1 + largest absolute hull coordinate
    kid_hulls: Optional[np.ndarray] = None  # children's hull vertices, stacked
    kid_offsets: Optional[np.ndarray] = None

    @property
    def is_leaf(self) -> bool:
        return not self.children


@dataclass(frozen=True)
class HalfPlane:
    """Open half-plane strictly left (or right) of the directed line ``a -> b``."""

    a: Point
    b: Point
    side: str = "left"

    @property
    def sign(self) -> float:
        return 1.0 if self.side == "left" else -1.0

    @property
    def normal(self):
        # points into the half-plane
        dx, dy = self.b[0] - self.a[0], self.b[1] - self.a[1]
        s = self.sign
        return (-dy * s, dx * s)

    def contains(self, p) -> bool:
        return orient(self.a, self.b, p) * self.sign > 0.0

    def mask(self, xy: np.ndarray) -> np.ndarray:
        """Exact membership for an array of points."""
        ax, ay = self.a
        bx, by = self.b
        det = (bx - ax) * (xy[:, 1] - ay) - (by - ay) * (xy[:, 0] - ax)
        # error bound of the double determinant, as in the scalar predicate
        bound = 3.4e-16 * (np.abs((bx - ax) * (xy[:, 1] - ay)) + np.abs((by - ay) * (xy[:, 0] - ax)))
        out = det * self.sign > bound
        unsure = np.nonzero(np.abs(det) <= bound)[0]
        for k in unsure:
            out[k] = self.contains((xy[k, 0], xy[k, 1]))
        return out


class Key:
    """Maximise ``x.d``, then ``x.t``, then prefer lexicographically smaller ``(x, y)``."""

    def __init__(self, d, tie=None):
        self.d = (float(d[0]), float(d[1]))
        self.t = None if tie is None else (float(tie[0]), float(tie[1]))

    def values(self, xy: np.ndarray):
        primary = xy[:, 0] * self.d[0] + xy[:, 1] * self.d[1]
        secondary = xy[:, 0] * self.t[0] + xy[:, 1] * self.t[1] if self.t else np.zeros(len(xy))
        return primary, secondary

    def best(self, xy: np.ndarray) -> int:
        """Row of the maximal key in ``xy`` (nonempty)."""
        p, s = self.values(xy)
        order = np.lexsort((xy[:, 1], xy[:, 0], -s, -p))
        return int(order[0])

    def tup(self, x: float, y: float):
        return (
            x * self.d[0] + y * self.d[1],
            (x * self.t[0] + y * self.t[1]) if self.t else 0.0,
            -x,
            -y,
        )


def _edge_angles(h: np.ndarray) -> np.ndarray:
    k = len(h)
    if k < 2:
        return np.zeros(0)
    e = np.roll(h, -1, axis=0) - h
    ang = np.arctan2(e[:, 1], e[:, 0])
    return ang[0] + np.mod(ang - ang[0], TWO_PI)


def _hull_arrays(pts: np.ndarray, idx: np.ndarray):
    if idx.size == 0:
        return np.zeros((0, 2)), idx
    hv = convex_hull([tuple(p) for p in pts[idx]], keep_collinear=True).vertices
    lookup = {}
    for k in idx:
        lookup.setdefault((pts[k, 0], pts[k, 1]), k)
    hidx = np.array([lookup[(v.x, v.y)] for v in hv], dtype=int)
    return pts[hidx], hidx


class PartitionTree:
    def __init__(self, points, r: int = 8, leaf_size: Optional[int] = None):
        if r < 2:
            raise ValueError("branching factor r must be at least 2")
        self.points = np.asarray(points, dtype=float).reshape(-1, 2)
        self.r = int(r)
        self.levels = max(1, int(round(math.log2(r))))
        self.leaf_size = leaf_size or self.r
        self.root = self._build_root()
        self.last_visits = 0

    # -- construction -----------------------------------------------------

    def _build_root(self) -> Node:
        pts = self.points
        idx = np.arange(len(pts))
        if len(pts) == 0:
            tri = (Point(0, 0), Point(1, 0), Point(0, 1))
        else:
            lo, hi = pts.min(axis=0), pts.max(axis=0)
            c = 0.5 * (lo + hi)
            rad = max(float(np.hypot(*(hi - lo))), 1.0)
            # equilateral triangle around the circumscribed disk, inflated a little
            R = 2.2 * rad
            tri = tuple(
                Point(c[0] + R * math.cos(a), c[1] + R * math.sin(a))
                for a in (math.pi / 2, math.pi / 2 + TWO_PI / 3, math.pi / 2 + 2 * TWO_PI / 3)
            )
        return self._make(tri, idx)

    def _make(self, tri, idx: np.ndarray) -> Node:
        h, hidx = _hull_arrays(self.points, idx)
        node = Node(tri, idx, h, hidx, _edge_angles(h))
        node.extent = float(np.abs(h).max()) + 1.0 if h.size else 1.0
        if len(idx) > self.leaf_size:
            parts = [(tri, idx)]
            for _ in range(self.levels):
                nxt = []
                for t, ix in parts:
                    nxt.extend(self._bisect(t, ix))
                parts = nxt
            node.children = [self._make(t, ix) for t, ix in parts if len(ix)]
            node.kid_hulls = np.concatenate([ch.hull for ch in node.children])
            node.kid_offsets = np.cumsum([0] + [len(ch.hull) for ch in node.children[:-1]])
        return node

    def _bisect(self, tri, idx: np.ndarray):
        """Cut ``tri`` by a ray from one corner so each side gets half the points."""
        a, b, c = tri
        # cut from the corner facing the longest side
        sides = [math.dist(b, c), math.dist(c, a), math.dist(a, b)]
        k = int(np.argmax(sides))
        apex, p, q = (a, b, c) if k == 0 else (b, c, a) if k == 1 else (c, a, b)
        if len(idx) < 2:
            return [(tri, idx)]
        xy = self.points[idx]
        base = math.atan2(p[1] - apex[1], p[0] - apex[0])
        ang = np.mod(np.arctan2(xy[:, 1] - apex[1], xy[:, 0] - apex[0]) - base, TWO_PI)
        ang[ang > math.pi] -= TWO_PI  # points at the apex itself
        order = np.argsort(ang, kind="stable")
        m = len(idx) // 2
        a_lo, a_hi = ang[order[m - 1]], ang[order[m]]
        cut = 0.5 * (a_lo + a_hi) + base
        u = (math.cos(cut), math.sin(cut))
        w = (q[0] - p[0], q[1] - p[1])
        s = line_param(apex, u, p, w)
        s = min(max(s, 0.0), 1.0)
        mid = Point(p[0] + s * w[0], p[1] + s * w[1])
        return [((apex, p, mid), idx[order[:m]]), ((apex, mid, q), idx[order[m:]])]

    # -- queries ----------------------------------------------------------

    def extreme(self, halfplanes: Sequence[HalfPlane], direction, tie=None) -> Optional[int]:
        """Index of the point maximising ``Key(direction, tie)`` inside all half-planes."""
        key = Key(direction, tie)
        best = None
        best_key = None
        visits = 0
        root = self.root
        if root.idx.size == 0:
            self.last_visits = 1
            return None
        stack = [(root, math.inf, _classify(root, halfplanes))]
        while stack:
            node, ub, state = stack.pop()
            visits += 1
            if best_key is not None and ub + 1e-12 * _scale(node, key.d) < best_key[0]:
                continue
            if state == "in":
                cand = _hull_best(node, key)
                ck = key.tup(*self.points[cand])
                if best_key is None or ck > best_key:
                    best, best_key = cand, ck
                continue
            if node.is_leaf:
                xy = self.points[node.idx]
                ok = np.ones(len(xy), dtype=bool)
                for hp in halfplanes:
                    ok &= hp.mask(xy)
                if ok.any():
                    sel = node.idx[ok]
                    cand = int(sel[key.best(self.points[sel])])
                    ck = key.tup(*self.points[cand])
                    if best_key is None or ck > best_key:
                        best, best_key = cand, ck
                continue
            ubs = np.maximum.reduceat(node.kid_hulls @ np.asarray(key.d), node.kid_offsets)
            states = _classify_children(node, halfplanes)
            # visit the most promising child last so it is popped first
            for k in np.argsort(ubs, kind="stable"):
                if states[k] != "out":
                    stack.append((node.children[k], float(ubs[k]), states[k]))
        self.last_visits = visits
        return best

    def extreme_in_halfplane(self, line, side: str, direction, tie=None) -> Optional[Point]:
        i = self.extreme([HalfPlane(Point(*line[0]), Point(*line[1]), side)], direction, tie)
        return None if i is None else Point(*self.points[i])

    def nodes(self):
        stack = [self.root]
        while stack:
            n = stack.pop()
            yield n
            stack.extend(n.children)

    def crossing_count(self, a, b) -> int:
        """Number of leaf triangles whose interior the line ``ab`` meets."""
        count = 0
        for n in self.nodes():
            if n.is_leaf:
                s = [orient(a, b, v) for v in n.triangle]
                if min(s) < 0 < max(s):
                    count += 1
        return count


def line_param(p, u, q, w) -> float:
    """Parameter ``t`` of the intersection ``q + t*w`` with the line ``p + s*u``."""
    den = u[0] * w[1] - u[1] * w[0]
    if den == 0.0:
        return 0.5
    return ((p[0] - q[0]) * u[1] - (p[1] - q[1]) * u[0]) / -den


def _extreme_vertex(node: Node, d) -> int:
    """Row of ``node.hull`` maximising the dot product with ``d`` (approximate)."""
    h = node.hull
    k = len(h)
    if k <= 2:
        return int(np.argmax(h @ np.asarray(d)))
    target = math.atan2(d[1], d[0]) + math.pi / 2
    a0 = node.edge_angles[0]
    t = a0 + (target - a0) % TWO_PI
    return int(np.searchsorted(node.edge_angles, t, side="left")) % k


def _near_extreme_rows(node: Node, d, scale: float):
    """Hull rows whose dot with ``d`` is within rounding of the maximum."""
    h = node.hull
    k = len(h)
    if k <= _SMALL_HULL:
        return slice(None)
    i0 = _extreme_vertex(node, d)
    dots = lambda i: h[i % k, 0] * d[0] + h[i % k, 1] * d[1]
    # settle on the true local maximum first
    i = i0
    for _ in range(k):
        if dots(i + 1) > dots(i):
            i += 1
        elif dots(i - 1) > dots(i):
            i -= 1
        else:
            break
    top = dots(i)
    tol = 1e-12 * scale
    rows = [i % k]
    j = i + 1
    while len(rows) < k and dots(j) >= top - tol:
        rows.append(j % k)
        j += 1
    j = i - 1
    while len(rows) < k and dots(j) >= top - tol:
        rows.append(j % k)
        j -= 1
    return rows


def _scale(node: Node, d) -> float:
    return (abs(d[0]) + abs(d[1])) * node.extent


def _hull_upper(node: Node, key: Key) -> float:
    """Largest primary key over the node's points."""
    if node.hull.size == 0:
        return -math.inf
    rows = _near_extreme_rows(node, key.d, _scale(node, key.d))
    h = node.hull[rows]
    return float(np.max(h[:, 0] * key.d[0] + h[:, 1] * key.d[1]))


def _hull_best(node: Node, key: Key) -> int:
    rows = _near_extreme_rows(node, key.d, _scale(node, key.d))
    cand = node.hull_idx[rows]
    xy = node.hull[rows]
    return int(cand[key.best(xy)])


def _classify(node: Node, halfplanes: Sequence[HalfPlane]) -> str:
    """'in' if every point is strictly inside every half-plane, 'out' if some
    half-plane holds none of them, 'mixed' otherwise."""
    inside = True
    for hp in halfplanes:
        n = hp.normal
        nn = math.hypot(*n)
        scale = _scale(node, n)
        off = hp.a[0] * n[0] + hp.a[1] * n[1]
        rows_max = _near_extreme_rows(node, n, scale)
        hmax = node.hull[rows_max]
        top = float(np.max(hmax[:, 0] * n[0] + hmax[:, 1] * n[1])) - off
        neg = (-n[0], -n[1])
        rows_min = _near_extreme_rows(node, neg, scale)
        hmin = node.hull[rows_min]
        bottom = float(np.min(hmin[:, 0] * n[0] + hmin[:, 1] * n[1])) - off
        margin = _MARGIN * max(scale, nn)
        if top < -margin:
            return "out"
        if bottom <= margin:
            inside = False
    return "in" if inside else "mixed"


def _classify_children(node: Node, halfplanes: Sequence[HalfPlane]) -> list:
    """``_classify`` for all children at once, with the parent's (larger) margin."""
    k = len(node.children)
    inside = np.ones(k, dtype=bool)
    out = np.zeros(k, dtype=bool)
    for hp in halfplanes:
        n = hp.normal
        off = hp.a[0] * n[0] + hp.a[1] * n[1]
        v = node.kid_hulls @ np.asarray(n) - off
        top = np.maximum.reduceat(v, node.kid_offsets)
        bottom = np.minimum.reduceat(v, node.kid_offsets)
        margin = _MARGIN * max(_scale(node, n), math.hypot(*n))
        out |= top < -margin
        inside &= bottom > margin
    return ["out" if o else "in" if i else "mixed" for o, i in zip(out, inside)]
