"""Planar primitives: points, angles, orientation, hulls and inscribed-angle arcs.

All arcs are stored counterclockwise as ``(center, radius, start_angle, sweep)``
with ``0 < sweep <= 2*pi``; the two endpoints are kept explicitly so that arcs
ending at guards share bit-identical coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, NamedTuple, Optional, Sequence, Union

from .errors import EmptyGuardSetError, GeometryError

TWO_PI = 2.0 * math.pi
EPS = 1e-9

# Shewchuk's static bound for the 2x2 orientation determinant.
_ORIENT_ERRBOUND = (3.0 + 16.0 * 2.0 ** -53) * 2.0 ** -53

# circles whose gap is this close to zero (relative) are treated as tangent
_TANGENT_GAP = 64.0 * 2.0 ** -52


class Point(NamedTuple):
    x: float
    y: float

    def __add__(self, other):  # type: ignore[override]
        return Point(self.x + other[0], self.y + other[1])

    def __sub__(self, other):
        return Point(self.x - other[0], self.y - other[1])

    def scale(self, s: float) -> "Point":
        return Point(self.x * s, self.y * s)

    def norm(self) -> float:
        return math.hypot(self.x, self.y)


Angle = float
PointLike = Union[Point, Sequence[float]]


def as_point(p: PointLike) -> Point:
    x, y = float(p[0]), float(p[1])
    if not (math.isfinite(x) and math.isfinite(y)):
        raise GeometryError(f"non-finite coordinate {p!r}")
    return Point(x, y)


def normalize_angle(a: float) -> float:
    """Map an angle to ``[0, 2*pi)``."""
    a = math.fmod(a, TWO_PI)
    if a < 0.0:
        a += TWO_PI
    if a >= TWO_PI:
        a = 0.0
    return a


def ccw_delta(a: float, b: float) -> float:
    """Counterclockwise angle from direction ``a`` to direction ``b`` in ``[0, 2*pi)``."""
    return normalize_angle(b - a)


def direction(p: PointLike, q: PointLike) -> float:
    return math.atan2(q[1] - p[1], q[0] - p[0])


def dist(p: PointLike, q: PointLike) -> float:
    return math.hypot(q[0] - p[0], q[1] - p[1])


def cross(ax: float, ay: float, bx: float, by: float) -> float:
    return ax * by - ay * bx


def orient(a: PointLike, b: PointLike, c: PointLike) -> float:
    """Twice the signed area of ``abc``; positive for a left turn.

    Falls back to exact rational arithmetic when the floating point result is
    within its rounding error bound, so the sign is always correct.
    """
    t1 = (b[0] - a[0]) * (c[1] - a[1])
    t2 = (b[1] - a[1]) * (c[0] - a[0])
    det = t1 - t2
    if abs(det) > _ORIENT_ERRBOUND * (abs(t1) + abs(t2)):
        return det
    ax, ay = Fraction(a[0]), Fraction(a[1])
    exact = (Fraction(b[0]) - ax) * (Fraction(c[1]) - ay) - (Fraction(b[1]) - ay) * (
        Fraction(c[0]) - ax
    )
    return float(exact)


def angle_at(p: PointLike, l: PointLike, r: PointLike) -> float:
    """Unsigned angle ``l p r`` in ``[0, pi]``."""
    ux, uy = l[0] - p[0], l[1] - p[1]
    vx, vy = r[0] - p[0], r[1] - p[1]
    if (ux == 0.0 and uy == 0.0) or (vx == 0.0 and vy == 0.0):
        raise GeometryError("angle_at: apex coincides with a leg point")
    return abs(math.atan2(ux * vy - uy * vx, ux * vx + uy * vy))


# ---------------------------------------------------------------------------
# Convex hull


@dataclass(frozen=True)
class ConvexHull:
    vertices: tuple  # counterclockwise, tuple[Point, ...]

    def __len__(self) -> int:
        return len(self.vertices)

    def edges(self):
        n = len(self.vertices)
        if n < 2:
            return []
        if n == 2:
            a, b = self.vertices
            return [(a, b), (b, a)]
        return [(self.vertices[i], self.vertices[(i + 1) % n]) for i in range(n)]

    def area(self) -> float:
        vs = self.vertices
        n = len(vs)
        s = 0.0
        for i in range(n):
            x0, y0 = vs[i]
            x1, y1 = vs[(i + 1) % n]
            s += x0 * y1 - x1 * y0
        return 0.5 * s

    def contains(self, p: PointLike, strict: bool = False) -> bool:
        """Point-in-hull test; boundary counts as inside unless ``strict``."""
        vs = self.vertices
        if len(vs) < 3:
            return False if strict else _on_degenerate_hull(vs, p)
        for a, b in self.edges():
            o = orient(a, b, p)
            if o < 0 or (strict and o == 0):
                return False
        return True


def _on_degenerate_hull(vs, p) -> bool:
    if len(vs) == 1:
        return tuple(vs[0]) == (p[0], p[1])
    a, b = vs
    if orient(a, b, p) != 0:
        return False
    return min(a[0], b[0]) <= p[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])


def convex_hull(points: Iterable[PointLike], keep_collinear: bool = False) -> ConvexHull:
    """Andrew's monotone chain.

    Returns vertices counterclockwise starting at the lexicographically
    smallest point. Collinear inputs give a 2-vertex (or 1-vertex) hull.
    With ``keep_collinear`` points lying on hull edges are kept as vertices.
    """
    pts = sorted({as_point(p) for p in points})
    if not pts:
        raise EmptyGuardSetError()
    if len(pts) <= 2:
        return ConvexHull(tuple(pts))
    if all(orient(pts[0], pts[-1], p) == 0 for p in pts):
        return ConvexHull((pts[0], pts[-1]))

    def chain(seq):
        out: list = []
        for p in seq:
            while len(out) >= 2:
                o = orient(out[-2], out[-1], p)
                if o < 0 or (o == 0 and not keep_collinear):
                    out.pop()
                else:
                    break
            out.append(p)
        return out

    lower = chain(pts)
    upper = chain(reversed(pts))
    return ConvexHull(tuple(lower[:-1] + upper[:-1]))


# ---------------------------------------------------------------------------
# Arcs


class Provenance(NamedTuple):
    """Which guard pair and inscribed angle generated an arc.

    ``l``/``r`` are the chord endpoints in the order passed to
    :func:`inscribed_arc`; the cone apex lies on ``side`` of the directed
    chord ``l -> r``.
    """

    l: Point
    r: Point
    angle: float
    side: str = "left"
    origin: str = ""


@dataclass(frozen=True)
class CircularArc:
    center: Point
    radius: float
    start_angle: float
    sweep: float
    start: Point
    end: Point
    provenance: Optional[Provenance] = field(default=None, compare=False)

    def __post_init__(self):
        if not self.radius > 0.0:
            raise GeometryError("arc radius must be positive")
        if not 0.0 < self.sweep <= TWO_PI + 1e-12:
            raise GeometryError(f"arc sweep out of range: {self.sweep}")

    @property
    def end_angle(self) -> float:
        return normalize_angle(self.start_angle + self.sweep)

    @property
    def ccw(self) -> bool:
        return True

    @property
    def is_full_circle(self) -> bool:
        return self.sweep >= TWO_PI - 1e-15

    def point_at(self, t: float) -> Point:
        """Point at parameter ``t`` in ``[0, 1]`` along the arc."""
        a = self.start_angle + t * self.sweep
        return Point(self.center.x + self.radius * math.cos(a), self.center.y + self.radius * math.sin(a))

    def midpoint(self) -> Point:
        return self.point_at(0.5)

    def offset_of(self, angle: float) -> float:
        """Counterclockwise angular offset of ``angle`` from the arc start."""
        return ccw_delta(self.start_angle, angle)

    def contains_angle(self, angle: float, tol: float = 0.0) -> bool:
        off = self.offset_of(angle)
        return off <= self.sweep + tol or off >= TWO_PI - tol

    def contains_point(self, p: PointLike, tol: float = EPS) -> bool:
        d = dist(self.center, p)
        if abs(d - self.radius) > tol * max(1.0, self.radius):
            return False
        return self.contains_angle(direction(self.center, p), tol)

    def length(self) -> float:
        return self.radius * self.sweep

    def bbox(self):
        xs = [self.start.x, self.end.x]
        ys = [self.start.y, self.end.y]
        cx, cy, r = self.center.x, self.center.y, self.radius
        for k, (dx, dy) in enumerate(((1, 0), (0, 1), (-1, 0), (0, -1))):
            if self.contains_angle(k * math.pi / 2):
                xs.append(cx + dx * r)
                ys.append(cy + dy * r)
        return min(xs), min(ys), max(xs), max(ys)

    def sub_arc(self, a: PointLike, b: PointLike) -> "CircularArc":
        """The counterclockwise piece of this arc's circle from ``a`` to ``b``."""
        return arc_from_points(self.center, self.radius, a, b, self.provenance)

    def sample(self, n: int):
        return [self.point_at(i / (n - 1)) for i in range(n)] if n > 1 else [self.midpoint()]


def arc_from_points(center: PointLike, radius: float, a: PointLike, b: PointLike, provenance=None) -> CircularArc:
    """Counterclockwise arc from ``a`` to ``b`` on the given circle."""
    c = as_point(center)
    a, b = as_point(a), as_point(b)
    sa = direction(c, a)
    sweep = ccw_delta(sa, direction(c, b))
    if sweep == 0.0:
        sweep = TWO_PI
    return CircularArc(c, float(radius), normalize_angle(sa), sweep, a, b, provenance)


def inscribed_arc(l: PointLike, r: PointLike, theta: float, side: str = "left", origin: str = "") -> CircularArc:
    """The arc over chord ``lr`` from which the chord is seen at angle ``theta``.

    The arc lies on ``side`` ("left" or "right") of the directed chord
    ``l -> r``; its radius is ``|lr| / (2 sin theta)``.
    """
    l, r = as_point(l), as_point(r)
    if l == r:
        raise GeometryError("degenerate chord")
    if not 0.0 < theta < math.pi:
        raise GeometryError("invalid inscribed angle")
    if side not in ("left", "right"):
        raise GeometryError(f"side must be 'left' or 'right', got {side!r}")
    prov = Provenance(l, r, float(theta), side, origin)
    a, b = (l, r) if side == "left" else (r, l)
    dx, dy = b.x - a.x, b.y - a.y
    d = math.hypot(dx, dy)
    radius = d / (2.0 * math.sin(theta))
    h = 0.5 / math.tan(theta)
    center = Point(0.5 * (a.x + b.x) - dy * h, 0.5 * (a.y + b.y) + dx * h)
    # on the left of a->b the arc runs counterclockwise from b to a
    sa = direction(center, b)
    return CircularArc(center, radius, normalize_angle(sa), TWO_PI - 2.0 * theta, b, a, prov)


@dataclass(frozen=True)
class CircularSegment:
    """Closed region bounded by an inscribed-angle arc and its chord."""

    l: Point
    r: Point
    theta: float
    side: str = "left"

    @property
    def arc(self) -> CircularArc:
        return inscribed_arc(self.l, self.r, self.theta, self.side)

    def _side_sign(self, p) -> float:
        o = orient(self.l, self.r, p)
        return o if self.side == "left" else -o

    def contains(self, p: PointLike, tol: float = EPS) -> bool:
        """Geometric membership: inside the supporting disk, on the arc side."""
        if self._side_sign(p) < -tol * dist(self.l, self.r) ** 2:
            return False
        arc = self.arc
        return dist(arc.center, p) <= arc.radius * (1.0 + tol)

    def contains_by_angle(self, p: PointLike) -> bool:
        """Angle-test membership: on the apex side and seeing the chord at >= theta."""
        p = as_point(p)
        if p == self.l or p == self.r:
            return True
        return self._side_sign(p) >= 0 and angle_at(p, self.l, self.r) >= self.theta


# ---------------------------------------------------------------------------
# Intersections


class ArcOverlap(NamedTuple):
    """Result of intersecting two co-circular arcs that share a positive-length piece."""

    pieces: tuple  # tuple[CircularArc, ...]


def _angular_overlap(a: CircularArc, b: CircularArc, tol: float):
    """Overlap of two arcs on the same circle as (start_offset, length) pairs relative to ``a``."""
    out = []
    bs = a.offset_of(b.start_angle)
    for shift in (bs - TWO_PI, bs, bs + TWO_PI):
        lo = max(0.0, shift)
        hi = min(a.sweep, shift + b.sweep)
        if hi - lo > tol:
            out.append((lo, hi - lo))
    return out


def circle_intersections(c1: PointLike, r1: float, c2: PointLike, r2: float, tol: float = EPS):
    """Intersection points of two circles; tangencies within ``tol`` give one point.

    Returns ``None`` for coincident circles.
    """
    dx, dy = c2[0] - c1[0], c2[1] - c1[1]
    d = math.hypot(dx, dy)
    scale = max(1.0, r1, r2)
    t = tol * scale
    if d <= t:
        return None if abs(r1 - r2) <= t else []
    if d > r1 + r2 + t or d < abs(r1 - r2) - t:
        return []
    a = (d * d + r1 * r1 - r2 * r2) / (2.0 * d)
    ux, uy = dx / d, dy / d
    # tangency is decided on the half-chord, not on d: nearly internally
    # tangent circles still cross at two well separated points
    h = math.sqrt(max(r1 * r1 - a * a, 0.0))
    # a gap at rounding level means tangency; h is only known to ~sqrt(eps) there
    gap = min(abs(d - (r1 + r2)), abs(d - abs(r1 - r2)))
    if h <= t or gap <= _TANGENT_GAP * scale:
        a = max(-r1, min(r1, a))
        return [Point(c1[0] + a * ux, c1[1] + a * uy)]
    mx, my = c1[0] + a * ux, c1[1] + a * uy
    return [Point(mx - h * uy, my + h * ux), Point(mx + h * uy, my - h * ux)]


def arc_arc_intersections(a: CircularArc, b: CircularArc, tol: float = EPS):
    """Points lying on both arcs, or an :class:`ArcOverlap` for co-circular overlap."""
    pts = circle_intersections(a.center, a.radius, b.center, b.radius, tol)
    ta = tol * 10.0
    if pts is None:
        pieces = _angular_overlap(a, b, ta)
        if pieces:
            return ArcOverlap(
                tuple(
                    CircularArc(
                        a.center,
                        a.radius,
                        normalize_angle(a.start_angle + lo),
                        ln,
                        a.point_at(lo / a.sweep),
                        a.point_at((lo + ln) / a.sweep),
                    )
                    for lo, ln in pieces
                )
            )
        out = []
        for p in (a.start, a.end):
            if b.contains_point(p, ta) and p not in out:
                out.append(p)
        return out
    return [
        p
        for p in pts
        if a.contains_angle(direction(a.center, p), ta / a.radius)
        and b.contains_angle(direction(b.center, p), ta / b.radius)
    ]


def arc_line_intersections(a: CircularArc, seg, tol: float = EPS, infinite: bool = True):
    """Intersections of an arc with the line through ``seg`` (or the segment itself)."""
    p, q = as_point(seg[0]), as_point(seg[1])
    if p == q:
        raise GeometryError("degenerate segment")
    dx, dy = q.x - p.x, q.y - p.y
    L = math.hypot(dx, dy)
    ux, uy = dx / L, dy / L
    # foot of the perpendicular from the center
    t0 = (a.center.x - p.x) * ux + (a.center.y - p.y) * uy
    fx, fy = p.x + t0 * ux, p.y + t0 * uy
    h = math.hypot(a.center.x - fx, a.center.y - fy)
    t = tol * max(1.0, a.radius)
    if h > a.radius + t:
        return []
    if abs(h - a.radius) <= t:
        cands = [(t0, Point(fx, fy))]
    else:
        s = math.sqrt(a.radius * a.radius - h * h)
        cands = [(t0 - s, Point(fx - s * ux, fy - s * uy)), (t0 + s, Point(fx + s * ux, fy + s * uy))]
    out = []
    for tt, pt in cands:
        if not infinite and not (-t <= tt <= L + t):
            continue
        if a.contains_angle(direction(a.center, pt), 10 * t / a.radius):
            # snap to exact arc endpoints when within tolerance
            for e in (a.start, a.end):
                if dist(e, pt) <= 10 * t:
                    pt = e
            out.append(pt)
    return out


def line_intersection(p: PointLike, u: PointLike, q: PointLike, w: PointLike) -> Optional[Point]:
    """Intersection of lines ``p + s*u`` and ``q + t*w``; ``None`` if parallel."""
    den = cross(u[0], u[1], w[0], w[1])
    if den == 0.0:
        return None
    s = cross(q[0] - p[0], q[1] - p[1], w[0], w[1]) / den
    return Point(p[0] + s * u[0], p[1] + s * u[1])


def point_arc_distance(p: PointLike, a: CircularArc) -> float:
    ang = direction(a.center, p)
    if a.contains_angle(ang):
        return abs(dist(a.center, p) - a.radius)
    return min(dist(p, a.start), dist(p, a.end))


def point_segment_distance(p: PointLike, a: PointLike, b: PointLike) -> float:
    dx, dy = b[0] - a[0], b[1] - a[1]
    L2 = dx * dx + dy * dy
    if L2 == 0.0:
        return dist(p, a)
    t = max(0.0, min(1.0, ((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / L2))
    return math.hypot(p[0] - a[0] - t * dx, p[1] - a[1] - t * dy)
