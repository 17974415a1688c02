"""Region boundaries as closed chains of circular-arc and straight edges."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .geometry import TWO_PI, CircularArc, Point, as_point, ccw_delta, direction


@dataclass(frozen=True)
class Edge:
    """One boundary piece from ``start`` to ``end``.

    Arc edges keep their circle and the traversal sense; ``ccw`` is False when
    the arc is walked clockwise around ``center``.
    """

    kind: str  # "arc" | "segment"
    start: Point
    end: Point
    center: Optional[Point] = None
    radius: Optional[float] = None
    ccw: bool = True
    sweep: float = 0.0  # unsigned angle swept along the arc

    @classmethod
    def segment(cls, a, b) -> "Edge":
        return cls("segment", as_point(a), as_point(b))

    @classmethod
    def arc(cls, center, radius: float, a, b, ccw: bool = True, sweep: Optional[float] = None) -> "Edge":
        c, a, b = as_point(center), as_point(a), as_point(b)
        if sweep is None:
            sa, sb = direction(c, a), direction(c, b)
            sweep = ccw_delta(sa, sb) if ccw else ccw_delta(sb, sa)
            if sweep == 0.0 and a == b:
                sweep = TWO_PI
        return cls("arc", a, b, c, float(radius), bool(ccw), float(sweep))

    @classmethod
    def from_arc(cls, a: CircularArc, reverse: bool = False) -> "Edge":
        if reverse:
            return cls.arc(a.center, a.radius, a.end, a.start, ccw=False, sweep=a.sweep)
        return cls.arc(a.center, a.radius, a.start, a.end, ccw=True, sweep=a.sweep)

    @property
    def is_arc(self) -> bool:
        return self.kind == "arc"

    def reversed(self) -> "Edge":
        if self.is_arc:
            return Edge("arc", self.end, self.start, self.center, self.radius, not self.ccw, self.sweep)
        return Edge("segment", self.end, self.start)

    def _start_angle(self) -> float:
        return direction(self.center, self.start)

    def point_at(self, t: float) -> Point:
        if not self.is_arc:
            return Point(self.start.x + t * (self.end.x - self.start.x), self.start.y + t * (self.end.y - self.start.y))
        s = 1.0 if self.ccw else -1.0
        a = self._start_angle() + s * t * self.sweep
        return Point(self.center.x + self.radius * math.cos(a), self.center.y + self.radius * math.sin(a))

    def sample(self, n: int):
        return [self.point_at(i / (n - 1)) for i in range(n)]

    def length(self) -> float:
        if self.is_arc:
            return self.radius * self.sweep
        return math.hypot(self.end.x - self.start.x, self.end.y - self.start.y)

    def as_ccw_arc(self) -> CircularArc:
        """The underlying arc as a counterclockwise :class:`CircularArc`."""
        a, b = (self.start, self.end) if self.ccw else (self.end, self.start)
        return CircularArc(self.center, self.radius, direction(self.center, a), self.sweep, a, b)

    def signed_area_term(self) -> float:
        """Contribution to ``1/2 * closed integral of (x dy - y dx)``."""
        ax, ay = self.start
        bx, by = self.end
        if not self.is_arc:
            return 0.5 * (ax * by - bx * ay)
        cx, cy = self.center
        sigma = self.sweep if self.ccw else -self.sweep
        return 0.5 * (cx * (by - ay) - cy * (bx - ax) + self.radius * self.radius * sigma)

    def bbox(self):
        if not self.is_arc:
            return (
                min(self.start.x, self.end.x),
                min(self.start.y, self.end.y),
                max(self.start.x, self.end.x),
                max(self.start.y, self.end.y),
            )
        return self.as_ccw_arc().bbox()

    def to_json(self) -> dict:
        d = {"type": self.kind, "endpoints": [list(self.start), list(self.end)]}
        if self.is_arc:
            d["center"] = list(self.center)
            d["radius"] = self.radius
            d["ccw"] = self.ccw
            d["sweep"] = self.sweep
        return d

    @classmethod
    def from_json(cls, d: dict) -> "Edge":
        a, b = d["endpoints"]
        if d["type"] == "segment":
            return cls.segment(a, b)
        return cls.arc(d["center"], d["radius"], a, b, ccw=d.get("ccw", True), sweep=d.get("sweep"))


def _chain_area(edges: Sequence[Edge]) -> float:
    return sum(e.signed_area_term() for e in edges)


@dataclass(frozen=True)
class Region:
    """A set of closed boundary chains; the region lies to the left of every chain.

    Outer boundaries run counterclockwise (positive area); a clockwise chain
    would bound a hole. ``whole_plane`` marks the theta = 2 pi answer.
    """

    chains: tuple = ()  # tuple[tuple[Edge, ...], ...]
    theta: Optional[float] = None
    whole_plane: bool = False
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def is_empty(self) -> bool:
        return not self.whole_plane and not self.chains

    @property
    def components(self) -> list:
        """Counterclockwise chains, one per connected component."""
        return [c for c in self.chains if _chain_area(c) > 0.0]

    @property
    def holes(self) -> list:
        return [c for c in self.chains if _chain_area(c) <= 0.0]

    def edges(self):
        for c in self.chains:
            yield from c

    @property
    def edge_count(self) -> int:
        return sum(len(c) for c in self.chains)

    @property
    def arc_count(self) -> int:
        return sum(1 for e in self.edges() if e.is_arc)

    def area(self) -> float:
        if self.whole_plane:
            return math.inf
        return sum(_chain_area(c) for c in self.chains)

    def check_closed(self, tol: float = 1e-9) -> bool:
        for c in self.chains:
            for e, f in zip(c, c[1:] + c[:1]):
                if math.hypot(e.end.x - f.start.x, e.end.y - f.start.y) > tol * max(1.0, e.length()):
                    return False
        return True

    # -- point queries ----------------------------------------------------

    def winding(self, P) -> np.ndarray:
        """Winding number of every chain set around each query point."""
        P = np.asarray(P, dtype=float).reshape(-1, 2)
        total = np.zeros(P.shape[0])
        for e in self.edges():
            total += _edge_winding(e, P)
        return np.rint(total / TWO_PI).astype(int)

    def contains(self, P) -> np.ndarray:
        P = np.asarray(P, dtype=float).reshape(-1, 2)
        if self.whole_plane:
            return np.ones(P.shape[0], dtype=bool)
        if not self.chains:
            return np.zeros(P.shape[0], dtype=bool)
        return self.winding(P) > 0

    def boundary_distance(self, P) -> np.ndarray:
        P = np.asarray(P, dtype=float).reshape(-1, 2)
        out = np.full(P.shape[0], np.inf)
        for e in self.edges():
            np.minimum(out, _edge_distance(e, P), out=out)
        return out

    def sample_boundary(self, per_edge: int = 32) -> np.ndarray:
        pts = [p for e in self.edges() for p in e.sample(per_edge)]
        return np.asarray(pts, dtype=float).reshape(-1, 2)

    # -- serialisation ----------------------------------------------------

    def to_json(self) -> dict:
        return {
            "theta": self.theta,
            "whole_plane": self.whole_plane,
            "empty": self.is_empty,
            "components": [{"edges": [e.to_json() for e in c]} for c in self.chains],
            **({"meta": self.meta} if self.meta else {}),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1, sort_keys=True)

    @classmethod
    def from_json(cls, d: dict) -> "Region":
        chains = tuple(tuple(Edge.from_json(e) for e in c["edges"]) for c in d.get("components", []))
        return cls(chains, d.get("theta"), bool(d.get("whole_plane", False)), d.get("meta", {}))

    @classmethod
    def polygon(cls, vertices, theta=None) -> "Region":
        vs = [as_point(v) for v in vertices]
        chain = tuple(Edge.segment(vs[i], vs[(i + 1) % len(vs)]) for i in range(len(vs)))
        return cls((chain,), theta)


def _edge_winding(e: Edge, P: np.ndarray) -> np.ndarray:
    """Signed angle swept by ``e`` as seen from each point of ``P``."""
    ax, ay = e.start.x - P[:, 0], e.start.y - P[:, 1]
    bx, by = e.end.x - P[:, 0], e.end.y - P[:, 1]
    # side of the chord, computed once so the angle and the segment test agree
    ex, ey = e.end.x - e.start.x, e.end.y - e.start.y
    side = ex * (P[:, 1] - e.start.y) - ey * (P[:, 0] - e.start.x)
    dot = ax * bx + ay * by
    chord = np.arctan2(side, dot)
    on_chord = (side == 0.0) & (dot < 0.0)
    if not e.is_arc:
        return chord
    # arc = chord + loop around the circular segment between arc and chord
    cx, cy = e.center
    inside = (P[:, 0] - cx) ** 2 + (P[:, 1] - cy) ** 2 < e.radius * e.radius
    if e.ccw:
        chord = np.where(on_chord, math.pi, chord)
        return chord + np.where(inside & (side < 0), TWO_PI, 0.0)
    chord = np.where(on_chord, -math.pi, chord)
    return chord - np.where(inside & (side > 0), TWO_PI, 0.0)


def _edge_distance(e: Edge, P: np.ndarray) -> np.ndarray:
    if not e.is_arc:
        ax, ay = e.start
        dx, dy = e.end.x - ax, e.end.y - ay
        L2 = dx * dx + dy * dy
        if L2 == 0.0:
            return np.hypot(P[:, 0] - ax, P[:, 1] - ay)
        t = np.clip(((P[:, 0] - ax) * dx + (P[:, 1] - ay) * dy) / L2, 0.0, 1.0)
        return np.hypot(P[:, 0] - ax - t * dx, P[:, 1] - ay - t * dy)
    arc = e.as_ccw_arc()
    cx, cy = arc.center
    ang = np.arctan2(P[:, 1] - cy, P[:, 0] - cx)
    off = np.mod(ang - arc.start_angle, TWO_PI)
    on_span = off <= arc.sweep
    radial = np.abs(np.hypot(P[:, 0] - cx, P[:, 1] - cy) - arc.radius)
    ends = np.minimum(
        np.hypot(P[:, 0] - arc.start.x, P[:, 1] - arc.start.y),
        np.hypot(P[:, 0] - arc.end.x, P[:, 1] - arc.end.y),
    )
    return np.where(on_span, radial, ends)


EMPTY = Region()


def empty_region(theta=None, **meta) -> Region:
    return Region((), theta, False, dict(meta))


def whole_plane(theta=None) -> Region:
    return Region((), theta, True)
