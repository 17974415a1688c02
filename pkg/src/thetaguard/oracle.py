"""Ground-truth guardedness.

``f(p)`` is the largest apex angle of a guard-free open cone at ``p``: sort
the directions from ``p`` to every guard and take the widest circular gap.
A point is theta-guarded iff ``f(p) < theta``; comparisons use a fixed
angular tolerance ``ANGLE_EPS`` so that points sitting exactly on the region
boundary (``f == theta`` up to rounding) are reported unguarded, matching the
open-region convention.
"""

from __future__ import annotations

import math
from fractions import Fraction
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .errors import GeometryError
from .geometry import TWO_PI, Point, as_point, orient

ANGLE_EPS = 1e-9
_CHUNK = 1 << 21  # matrix entries per vectorised block


@dataclass(frozen=True)
class GuardSet:
    guards: tuple  # tuple[Point, ...], duplicates removed, first occurrence kept
    xy: np.ndarray

    @classmethod
    def from_points(cls, points: Iterable) -> "GuardSet":
        seen = {}
        for p in points:
            q = as_point(p)
            seen.setdefault(q, None)
        guards = tuple(seen)
        xy = np.array(guards, dtype=float).reshape(-1, 2)
        xy.setflags(write=False)
        return cls(guards, xy)

    def __len__(self) -> int:
        return len(self.guards)

    def __iter__(self):
        return iter(self.guards)

    @property
    def n(self) -> int:
        return len(self.guards)

    @property
    def bbox(self):
        if not self.guards:
            return None
        lo = self.xy.min(axis=0)
        hi = self.xy.max(axis=0)
        return (float(lo[0]), float(lo[1])), (float(hi[0]), float(hi[1]))

    @property
    def diameter(self) -> float:
        bb = self.bbox
        if bb is None:
            return 0.0
        return math.hypot(bb[1][0] - bb[0][0], bb[1][1] - bb[0][1])

    def index_of(self, p) -> Optional[int]:
        try:
            return self.guards.index(as_point(p))
        except ValueError:
            return None


def as_guard_set(G) -> GuardSet:
    return G if isinstance(G, GuardSet) else GuardSet.from_points(G)


@dataclass(frozen=True)
class ConeWitness:
    """An empty open cone ``(start, start + extent)`` at ``apex``.

    ``g_max`` lies on the clockwise boundary ray (direction ``start``) and
    ``g_min`` on the counterclockwise one.
    """

    apex: Point
    start: float
    extent: float
    g_min: Optional[Point]
    g_max: Optional[Point]

    def contains_direction(self, angle: float, tol: float = 0.0) -> bool:
        off = (angle - self.start) % TWO_PI
        return tol < off < self.extent - tol

    def is_empty(self, G, tol: float = 1e-12) -> bool:
        """Direct membership test: no guard strictly inside the open cone."""
        G = as_guard_set(G)
        for g in G.guards:
            if g == self.apex:
                continue
            if self.extent >= TWO_PI:
                continue
            a = math.atan2(g.y - self.apex.y, g.x - self.apex.x)
            if self.contains_direction(a, tol):
                return False
        return True


@dataclass
class Raster:
    bbox: tuple  # ((xmin, ymin), (xmax, ymax))
    cols: int
    rows: int
    theta: float
    f: np.ndarray  # shape (rows, cols); row 0 is the bottom row
    guarded: np.ndarray

    @property
    def cell_size(self):
        (x0, y0), (x1, y1) = self.bbox
        return (x1 - x0) / self.cols, (y1 - y0) / self.rows

    def centers(self):
        return cell_centers(self.bbox, self.cols, self.rows)

    def components(self, connectivity: int = 4) -> int:
        from scipy import ndimage

        structure = ndimage.generate_binary_structure(2, 1 if connectivity == 4 else 2)
        _, count = ndimage.label(self.guarded, structure=structure)
        return int(count)


def cell_centers(bbox, cols: int, rows: int):
    (x0, y0), (x1, y1) = bbox
    xs = x0 + (np.arange(cols) + 0.5) * ((x1 - x0) / cols)
    ys = y0 + (np.arange(rows) + 0.5) * ((y1 - y0) / rows)
    return np.meshgrid(xs, ys)


# ---------------------------------------------------------------------------
# f(p)


def _gap_matrix(P: np.ndarray, Gxy: np.ndarray):
    """Sorted direction angles from each row of ``P`` to all guards.

    A guard coinciding with the query point is replaced by a copy of another
    guard's direction, which adds only a zero-width gap.
    """
    ang = np.arctan2(Gxy[None, :, 1] - P[:, None, 1], Gxy[None, :, 0] - P[:, None, 0])
    same = (Gxy[None, :, 0] == P[:, None, 0]) & (Gxy[None, :, 1] == P[:, None, 1])
    valid = ~same
    if same.any():
        rows = np.nonzero(same.any(axis=1))[0]
        for i in rows:
            ok = np.nonzero(valid[i])[0]
            if ok.size:
                ang[i, same[i]] = ang[i, ok[0]]
    return ang, valid


def max_empty_cone_angles(P, G) -> np.ndarray:
    """Vectorised ``f`` for an ``(m, 2)`` array of query points."""
    G = as_guard_set(G)
    P = np.asarray(P, dtype=float).reshape(-1, 2)
    m = P.shape[0]
    out = np.full(m, TWO_PI)
    n = G.n
    if n == 0 or m == 0:
        return out
    step = max(1, _CHUNK // n)
    for s in range(0, m, step):
        Q = P[s : s + step]
        ang, valid = _gap_matrix(Q, G.xy)
        nvalid = valid.sum(axis=1)
        ang.sort(axis=1)
        if n > 1:
            gaps = np.diff(ang, axis=1).max(axis=1)
        else:
            gaps = np.zeros(Q.shape[0])
        wrap = ang[:, 0] + TWO_PI - ang[:, -1]
        f = np.maximum(gaps, wrap)
        f[nvalid <= 1] = TWO_PI
        out[s : s + step] = f
    return out


def max_empty_cone_angle(p, G) -> float:
    return float(max_empty_cone_angles(np.asarray([as_point(p)]), G)[0])


def _ordered_directions(p: Point, G: GuardSet, exclude: Optional[Point] = None):
    """Guard indices sorted by (direction, distance) around ``p``, plus the angles."""
    xy = G.xy
    keep = ~((xy[:, 0] == p.x) & (xy[:, 1] == p.y))
    if exclude is not None:
        keep &= ~((xy[:, 0] == exclude.x) & (xy[:, 1] == exclude.y))
    idx = np.nonzero(keep)[0]
    dx = xy[idx, 0] - p.x
    dy = xy[idx, 1] - p.y
    ang = np.arctan2(dy, dx)
    d2 = dx * dx + dy * dy
    order = np.lexsort((d2, ang))
    return idx[order], ang[order]


def _gaps_around(p: Point, G: GuardSet):
    """All circular gaps around ``p`` as (extent, start_angle, cw_guard, ccw_guard)."""
    idx, ang = _ordered_directions(p, G)
    k = idx.size
    if k == 0:
        return [(TWO_PI, 0.0, None, None)]
    # first index of each run of equal angles (nearest guard of that direction)
    firsts = [0] + [i for i in range(1, k) if ang[i] != ang[i - 1]]
    if len(firsts) == 1:
        g = G.guards[idx[0]]
        return [(TWO_PI, float(ang[0]), g, g)]
    out = []
    for j, i in enumerate(firsts):
        nxt = firsts[(j + 1) % len(firsts)]
        if j + 1 < len(firsts):
            extent = ang[nxt] - ang[i]
        else:
            extent = ang[nxt] + TWO_PI - ang[i]
        out.append((float(extent), float(ang[i]), G.guards[idx[i]], G.guards[idx[nxt]]))
    return out


def max_empty_cone(p, G) -> ConeWitness:
    """The widest empty cone at ``p`` with its two bounding guards."""
    p = as_point(p)
    G = as_guard_set(G)
    gaps = _gaps_around(p, G)
    ext, start, g_cw, g_ccw = max(gaps, key=lambda t: t[0])
    return ConeWitness(p, start, ext, g_ccw, g_cw)


def is_theta_guarded(p, G, theta: float) -> bool:
    _check_theta(theta)
    return max_empty_cone_angle(p, G) < theta - ANGLE_EPS


def guarded_mask(P, G, theta: float) -> np.ndarray:
    _check_theta(theta)
    return max_empty_cone_angles(P, G) < theta - ANGLE_EPS


def _check_theta(theta: float):
    if not 0.0 < theta <= TWO_PI + 1e-12:
        raise GeometryError(f"theta must lie in (0, 2pi], got {theta}")


def maximal_empty_cones(g, G, theta: float) -> list:
    """Every empty cone at guard ``g`` that is a full gap of width >= ``theta``."""
    g = as_point(g)
    G = as_guard_set(G)
    if not 0.0 < theta < math.pi:
        raise GeometryError("theta must lie in (0, pi)")
    out = []
    for ext, start, g_cw, g_ccw in _gaps_around(g, G):
        if g_cw is None:
            continue
        if ext >= theta - ANGLE_EPS:
            out.append(ConeWitness(g, start, ext, g_ccw, g_cw))
    return out


# ---------------------------------------------------------------------------
# Batched classification: rotational sweep with incremental guard hulls


def _gap_value(a_ang: float, b_ang: float) -> float:
    # same floating point expressions as max_empty_cone_angles
    if b_ang >= a_ang:
        return b_ang - a_ang
    return b_ang + TWO_PI - a_ang


class _HalfplaneSweep:
    """For every query, the extreme guard directions inside its forward half-plane.

    Points are processed in decreasing projection onto ``d``; guards are added
    to Andrew-style left/right chains, so when a query is reached the chains
    hold the convex hull of every guard at least as far forward. Tangents from
    the query are found by binary search on the chains.
    """

    def __init__(self, Gxy: np.ndarray, Pxy: np.ndarray, d):
        self.G = Gxy
        self.P = Pxy
        self.d = d
        # base direction of the half-plane, i.e. d rotated by -90 degrees
        self.base = (d[1], -d[0])

    def _less(self, p, a, b) -> bool:
        """Whether guard ``a`` is strictly clockwise of guard ``b`` seen from ``p``."""
        o = orient(p, a, b)
        if o != 0.0:
            return o > 0.0
        ax, ay = a[0] - p[0], a[1] - p[1]
        bx, by = b[0] - p[0], b[1] - p[1]
        if ax * bx + ay * by < 0.0:
            # opposite directions: the one along the base direction comes first
            return ax * self.base[0] + ay * self.base[1] > 0.0
        return False

    def run(self):
        G, P, d = self.G, self.P, self.d
        n, m = G.shape[0], P.shape[0]
        proj = np.concatenate([G @ np.asarray(d), P @ np.asarray(d)])
        kind = np.concatenate([np.zeros(n, dtype=int), np.ones(m, dtype=int)])
        side = np.concatenate([G @ np.asarray(self.base), P @ np.asarray(self.base)])
        # forward first; guards before queries at equal projection
        order = np.lexsort((side, kind, -proj))
        order = self._exact_ties(order, proj, kind)
        lower: list = []  # chain on the counterclockwise (left) side
        upper: list = []  # chain on the clockwise (right) side
        lo_idx = np.full(m, -1)
        hi_idx = np.full(m, -1)
        pts = [tuple(r) for r in G]
        for k in order:
            if kind[k] == 0:
                p = pts[k]
                while len(upper) >= 2 and orient(pts[upper[-2]], pts[upper[-1]], p) >= 0.0:
                    upper.pop()
                upper.append(k)
                while len(lower) >= 2 and orient(pts[lower[-2]], pts[lower[-1]], p) <= 0.0:
                    lower.pop()
                lower.append(k)
            else:
                q = k - n
                if not upper:
                    continue
                p = (P[q, 0], P[q, 1])
                lo_idx[q] = self._extreme(p, upper, pts, want_min=True)
                hi_idx[q] = self._extreme(p, lower, pts, want_min=False)
        return lo_idx, hi_idx

    def _exact_ties(self, order, proj, kind):
        """Re-sort runs of near-equal projections with exact rational keys.

        Rounded projections are not a linear function of the input, so near-ties
        can come out in an order no sweep direction produces. Exact keys restore
        a genuine lexicographic sweep order.
        """
        allxy = np.concatenate([self.G, self.P])
        scale = max(1.0, float(np.max(np.abs(proj)))) if proj.size else 1.0
        keys = -proj[order]
        close = np.diff(keys) <= 1e-9 * scale
        if not close.any():
            return order
        dx, dy = Fraction(self.d[0]), Fraction(self.d[1])
        bx, by = Fraction(self.base[0]), Fraction(self.base[1])
        out = list(order)
        i = 0
        while i < len(out) - 1:
            if not close[i]:
                i += 1
                continue
            j = i
            while j < len(close) and close[j]:
                j += 1
            run = out[i:j + 1]

            def key(k):
                x, y = Fraction(allxy[k, 0]), Fraction(allxy[k, 1])
                return (-(x * dx + y * dy), int(kind[k]), x * bx + y * by)

            out[i:j + 1] = sorted(run, key=key)
            i = j + 1
        return np.asarray(out)

    def _extreme(self, p, chain, pts, want_min: bool) -> int:
        # unimodal along a convex chain seen from outside: binary search for the turn
        lo, hi = 0, len(chain) - 1
        while lo < hi:
            mid = (lo + hi) // 2
            a, b = pts[chain[mid]], pts[chain[mid + 1]]
            if want_min:
                step_ok = self._less(p, b, a)
            else:
                step_ok = self._less(p, a, b)
            if step_ok:
                lo = mid + 1
            else:
                hi = mid
        best = lo
        # walk neighbouring ties and rounding slack
        for j in (lo - 1, lo + 1):
            if 0 <= j < len(chain):
                a, b = pts[chain[j]], pts[chain[best]]
                better = self._less(p, a, b) if want_min else self._less(p, b, a)
                if better:
                    best = j
        return chain[best]


def _split_normal(s: float) -> tuple:
    """Unit normal of the split line at angle ``s``, exact on the axes.

    Rounding ``cos(pi/2)`` to 6e-17 breaks projection ties on lattice input in
    a way no single sweep direction reproduces, which corrupts the chains.
    """
    dx, dy = math.cos(s + math.pi / 2), math.sin(s + math.pi / 2)
    if abs(dx) < 1e-12:
        dx, dy = 0.0, math.copysign(1.0, dy)
    elif abs(dy) < 1e-12:
        dx, dy = math.copysign(1.0, dx), 0.0
    return dx, dy


def batch_unguarded(P, G, theta: float, naive: bool = False) -> list:
    """Indices of theta-unguarded query points with one widest-cone witness each.

    The sweep uses ``floor(pi / theta') + 1`` split lines (angular spacing
    strictly below ``theta' = theta - 2*ANGLE_EPS``), so every empty cone of
    width ``>= theta - ANGLE_EPS`` contains one of the split directions and
    is recovered exactly from the two half-plane tangents around it.
    """
    G = as_guard_set(G)
    P = np.asarray(P, dtype=float).reshape(-1, 2)
    _check_theta(theta)
    m = P.shape[0]
    if m == 0:
        return []
    if naive or G.n == 0 or theta >= math.pi:
        return _batch_naive(P, G, theta)

    gset = {g: i for i, g in enumerate(G.guards)}
    coincident = np.array([(float(x), float(y)) in gset for x, y in P], dtype=bool)
    regular = np.nonzero(~coincident)[0]
    result = dict(_batch_naive_indexed(P, G, theta, np.nonzero(coincident)[0]))

    Q = P[regular]
    Gxy = np.asarray(G.xy)
    best = np.full(Q.shape[0], -1.0)
    best_pair = np.full((Q.shape[0], 2), -1)
    lines = int(math.floor(math.pi / (theta - 2 * ANGLE_EPS))) + 1
    for j in range(lines):
        s = j * math.pi / lines
        d = _split_normal(s)
        a_lo, a_hi = _HalfplaneSweep(Gxy, Q, d).run()  # directions (s, s + pi)
        b_lo, b_hi = _HalfplaneSweep(Gxy, Q, (-d[0], -d[1])).run()  # (s + pi, s + 2pi)
        for qi in range(Q.shape[0]):
            a_empty = a_lo[qi] < 0
            b_empty = b_hi[qi] < 0
            if a_empty and b_empty:
                continue
            long_way = a_empty or b_empty
            # gap containing s runs from b_hi to a_lo; gap containing s + pi from a_hi to b_lo;
            # an empty half is crossed and the gap ends on the far side of the other half
            pairs = (
                (a_hi[qi] if b_empty else b_hi[qi], b_lo[qi] if a_empty else a_lo[qi]),
                (b_hi[qi] if a_empty else a_hi[qi], a_lo[qi] if b_empty else b_lo[qi]),
            )
            for cw, ccw in pairs:
                gap = _pair_gap(Q[qi], Gxy, cw, ccw, long_way)
                if gap > best[qi]:
                    best[qi] = gap
                    best_pair[qi] = (cw, ccw)
    for k, qi in enumerate(regular):
        if best[k] >= theta - ANGLE_EPS:
            cw, ccw = best_pair[k]
            apex = Point(float(P[qi, 0]), float(P[qi, 1]))
            a_cw = math.atan2(Gxy[cw, 1] - apex.y, Gxy[cw, 0] - apex.x)
            result[int(qi)] = ConeWitness(apex, float(a_cw), float(best[k]), G.guards[ccw], G.guards[cw])
    return sorted(result.items())


def _pair_gap(p, Gxy, cw: int, ccw: int, long_way: bool) -> float:
    a = np.arctan2(Gxy[[cw, ccw], 1] - p[1], Gxy[[cw, ccw], 0] - p[0])
    a_cw, a_ccw = float(a[0]), float(a[1])
    if a_cw == a_ccw:
        # one direction only: the full turn if the other half is empty, else a
        # guard sits on the split line and no gap contains it
        return TWO_PI if long_way else 0.0
    return _gap_value(a_cw, a_ccw)


def _batch_naive_indexed(P, G, theta, indices):
    for i in indices:
        w = max_empty_cone(P[i], G)
        if w.extent >= theta - ANGLE_EPS:
            yield int(i), w


def _batch_naive(P, G, theta):
    f = max_empty_cone_angles(P, G)
    idx = np.nonzero(f >= theta - ANGLE_EPS)[0]
    return list(_batch_naive_indexed(P, G, theta, idx))


# ---------------------------------------------------------------------------
# Rasters


def rasterize(G, theta: float, bbox=None, resolution=(200, 200)) -> Raster:
    """Evaluate ``f`` at every cell center of a ``cols x rows`` grid."""
    G = as_guard_set(G)
    _check_theta(theta)
    cols, rows = (resolution, resolution) if isinstance(resolution, int) else resolution
    if cols < 2 or rows < 2:
        raise GeometryError("resolution must be at least 2x2")
    if bbox is None:
        bbox = padded_bbox(G)
    X, Y = cell_centers(bbox, cols, rows)
    f = max_empty_cone_angles(np.column_stack([X.ravel(), Y.ravel()]), G).reshape(rows, cols)
    return Raster(bbox, cols, rows, theta, f, f < theta - ANGLE_EPS)


def padded_bbox(G, pad: float = 0.05):
    G = as_guard_set(G)
    bb = G.bbox
    if bb is None:
        return ((-1.0, -1.0), (1.0, 1.0))
    (x0, y0), (x1, y1) = bb
    w = max(x1 - x0, y1 - y0, 1e-12)
    return ((x0 - pad * w, y0 - pad * w), (x1 + pad * w, y1 + pad * w))


def lattice_guarded(G, theta: float, points: np.ndarray) -> np.ndarray:
    """Guarded flags for an arbitrary array of sample points."""
    return guarded_mask(points, G, theta)
