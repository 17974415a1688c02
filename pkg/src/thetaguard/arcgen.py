"""Candidate boundary arcs for theta < pi.

The boundary of the theta-region consists of inscribed-angle arcs over guard
pairs. The candidate set holds one arc per convex hull edge and, for every
empty cone of width >= theta at a guard inside the hull, two pairs of arcs
found by sliding a theta-cone away from that guard until its free ray touches
another guard.
"""

from __future__ import annotations

import json
import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import PreconditionError
from .geometry import (
    TWO_PI,
    CircularArc,
    Point,
    as_point,
    convex_hull,
    direction,
    dist,
    inscribed_arc,
    normalize_angle,
)
from .oracle import ConeWitness, as_guard_set, maximal_empty_cones
from .partition import HalfPlane, Key, PartitionTree

ORIGINS = ("hull-edge", "slide-right", "slide-left")


@dataclass
class CandidateArcSet:
    arcs: list
    theta: float
    provably_empty: bool = False
    stats: dict = field(default_factory=dict)
    # per source guard: number of arcs generated for its cones that end at the guard itself
    self_endpoints: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.arcs)

    def counts(self) -> Counter:
        return Counter(a.provenance.origin.split(":")[0] for a in self.arcs)

    def signature(self):
        """Order-independent description used to compare backends."""
        return sorted(
            (
                round(a.center.x, 9),
                round(a.center.y, 9),
                round(a.radius, 9),
                round(a.start_angle, 9),
                round(a.sweep, 9),
            )
            for a in self.arcs
        )

    def to_json(self) -> dict:
        return {
            "theta": self.theta,
            "provably_empty": self.provably_empty,
            "stats": self.stats,
            "arcs": [
                {
                    "center": list(a.center),
                    "radius": a.radius,
                    "start_angle": a.start_angle,
                    "sweep": a.sweep,
                    "start": list(a.start),
                    "end": list(a.end),
                    "chord": [list(a.provenance.l), list(a.provenance.r)] if a.provenance else None,
                    "origin": a.provenance.origin if a.provenance else None,
                }
                for a in self.arcs
            ],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1, sort_keys=True)


# ---------------------------------------------------------------------------
# Tangent guard queries


class _NaiveBackend:
    def __init__(self, xy: np.ndarray):
        self.points = xy

    def extreme(self, halfplanes, d, tie=None) -> Optional[int]:
        xy = self.points
        ok = np.ones(len(xy), dtype=bool)
        for hp in halfplanes:
            ok &= hp.mask(xy)
        if not ok.any():
            return None
        sel = np.nonzero(ok)[0]
        return int(sel[Key(d, tie).best(xy[sel])])


def make_backend(G, backend: str = "naive", r: int = 8):
    G = as_guard_set(G)
    if backend == "naive":
        return _NaiveBackend(np.asarray(G.xy))
    if backend in ("partition-tree", "tree"):
        return PartitionTree(np.asarray(G.xy), r=r)
    raise ValueError(f"unknown tangent backend {backend!r}")


def find_tangent_guard(g, g_anchor, theta: float, side: str, G, backend="naive"):
    """Slide the theta-cone at ``g`` with one ray through ``g_anchor`` until the free ray hits a guard.

    The cone opens from the ray ``g -> g_anchor`` by ``theta`` toward ``side``
    ("left" = counterclockwise). Its apex moves along the line through ``g``
    and ``g_anchor`` away from the anchor. Returns ``(guard, apex)`` for the
    first guard touched by the free ray (the one nearest the apex on ties), or
    ``None`` if the cone escapes.
    """
    g, anchor = as_point(g), as_point(g_anchor)
    if g == anchor:
        raise PreconditionError("g and g_anchor must differ")
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    G = as_guard_set(G)
    be = backend if not isinstance(backend, str) else make_backend(G, backend)
    sgn = 1.0 if side == "left" else -1.0
    L = dist(g, anchor)
    ux, uy = (anchor.x - g.x) / L, (anchor.y - g.y) / L
    c, s = math.cos(theta), sgn * math.sin(theta)
    wx, wy = ux * c - uy * s, ux * s + uy * c
    # guard q = g + alpha*u + beta*w; candidates have beta > 0
    free_side = HalfPlane(g, anchor, side)
    d_alpha = (wy / s, -wx / s)
    d_nearest = (uy / s, -ux / s)  # maximises -beta
    k = be.extreme([free_side], d_alpha, d_nearest)
    if k is None:
        return None
    q = Point(*be.points[k])
    alpha = ((q.x - g.x) * d_alpha[0] + (q.y - g.y) * d_alpha[1])
    scale = max(L, dist(g, q))
    if alpha > 1e-9 * scale:
        raise PreconditionError(f"cone at {tuple(g)} toward {tuple(anchor)} is not empty: contains {tuple(q)}")
    alpha = min(alpha, 0.0)
    # guards on the free ray with the same contact up to rounding: keep the one nearest the apex
    tol = 1e-9 * scale
    foot = Point(g.x + (alpha - tol) * ux, g.y + (alpha - tol) * uy)
    near_line = HalfPlane(foot, Point(foot.x + wx, foot.y + wy), "right" if sgn > 0 else "left")
    k2 = be.extreme([free_side, near_line], d_nearest, d_alpha)
    if k2 is not None:
        q = Point(*be.points[k2])
    apex = Point(g.x + alpha * ux, g.y + alpha * uy)
    return q, apex


# ---------------------------------------------------------------------------
# Candidate arcs


def _piece(l: Point, r: Point, theta: float, a: Point, b: Point, origin: str) -> Optional[CircularArc]:
    """Counterclockwise piece from ``a`` to ``b`` of the inscribed arc over chord ``(l, r)``."""
    if a == b or dist(a, b) <= 1e-12 * max(1.0, dist(l, r)):
        return None
    full = inscribed_arc(l, r, theta, "left", origin)
    piece = full.sub_arc(a, b)
    if piece.sweep > full.sweep + 1e-9:
        return None
    return piece


def _hull_vertex_set(G):
    hull = convex_hull(G.guards, keep_collinear=True)
    return hull, set(hull.vertices)


def generate_candidate_arcs(
    G, theta: float, tangent_backend: str = "naive", r: int = 8, hull_vertex_cones: bool = True
) -> CandidateArcSet:
    """Hull-edge arcs plus the slide arcs of every maximal empty cone.

    With ``hull_vertex_cones`` the cone step also runs at hull vertices. A
    boundary arc can end where a ray holds a hull vertex and a farther guard,
    and only the slide from that hull vertex produces it.
    """
    G = as_guard_set(G)
    if not 0.0 < theta < math.pi:
        raise PreconditionError("theta must lie in (0, pi)")
    if G.n < 3:
        return CandidateArcSet([], theta, provably_empty=True, stats={"reason": "fewer than three guards"})
    hull, on_hull = _hull_vertex_set(G)
    if len(hull) < 3:
        return CandidateArcSet([], theta, provably_empty=True, stats={"reason": "collinear guards"})

    arcs = []
    for u, v in hull.edges():
        arcs.append(inscribed_arc(u, v, theta, "left", "hull-edge"))

    be = make_backend(G, tangent_backend, r)
    self_ends: dict = defaultdict(int)
    for g in G.guards:
        if g in on_hull and not hull_vertex_cones:
            continue
        for cone in maximal_empty_cones(g, G, theta):
            new = _cone_arcs(g, cone, theta, G, be)
            for a in new:
                arcs.append(a)
                if a.provenance.origin.endswith(":self"):
                    self_ends[g] += 1
    merged = merge_cocircular(arcs)
    out = CandidateArcSet(sorted(merged, key=_arc_key), theta)
    out.stats = {
        "n": G.n,
        "hull": len(hull),
        "raw": len(arcs),
        "merged": len(merged),
        **{k: v for k, v in Counter(a.provenance.origin.split(":")[0] for a in arcs).items()},
    }
    out.self_endpoints = dict(self_ends)
    return out


def _cone_arcs(g: Point, cone: ConeWitness, theta: float, G, be) -> list:
    out = []
    g_min, g_max = cone.g_min, cone.g_max
    # left ray pinned through g_min, slide until the right ray touches g_r
    hit = find_tangent_guard(g, g_min, theta, "right", G, be)
    if hit is not None:
        g_r, p_r = hit
        # apex sees g_r on its right ray and g, g_min on its left ray
        out.append(_piece(g_r, g_min, theta, p_r, g_r, "slide-right:tangent"))
        out.append(_piece(g_r, g, theta, g, p_r, "slide-right:self"))
    # right ray pinned through g_max, slide until the left ray touches g_l
    hit = find_tangent_guard(g, g_max, theta, "left", G, be)
    if hit is not None:
        g_l, p_l = hit
        out.append(_piece(g_max, g_l, theta, g_l, p_l, "slide-left:tangent"))
        out.append(_piece(g, g_l, theta, p_l, g, "slide-left:self"))
    return [a for a in out if a is not None]


def _arc_key(a: CircularArc):
    return (a.center.x, a.center.y, a.radius, a.start_angle, a.sweep)


def merge_cocircular(arcs, tol: float = 1e-9) -> list:
    """Union overlapping arcs that lie on the same circle."""
    if not arcs:
        return []
    scale = max(1.0, max(max(abs(a.center.x), abs(a.center.y), a.radius) for a in arcs))
    groups: dict = defaultdict(list)
    q = tol * scale * 10
    for a in arcs:
        groups[(round(a.center.x / q), round(a.center.y / q), round(a.radius / q))].append(a)
    out = []
    for grp in groups.values():
        out.extend(_merge_spans(grp))
    return out


def _merge_spans(arcs) -> list:
    if len(arcs) == 1:
        return list(arcs)
    base = arcs[0]
    c, R = base.center, base.radius
    spans = sorted(((normalize_angle(a.start_angle), a.sweep, a) for a in arcs), key=lambda t: t[:2])
    merged = []  # [start, end, representative]
    for s, w, a in spans:
        if merged and s <= merged[-1][1] + 1e-12:
            if s + w > merged[-1][1]:
                merged[-1][1] = s + w
        else:
            merged.append([s, s + w, a])
    # wrap-around: the last span may reach past the first start
    if len(merged) > 1 and merged[-1][1] >= merged[0][0] + TWO_PI - 1e-12:
        first = merged.pop(0)
        merged[-1][1] = max(merged[-1][1], first[1] + TWO_PI)
    out = []
    for s, e, a in merged:
        sweep = min(e - s, TWO_PI)
        if len([1 for x in arcs if x is a]) and abs(sweep - a.sweep) <= 1e-15 and abs(normalize_angle(a.start_angle) - s) <= 1e-15:
            out.append(a)
            continue
        start = Point(c.x + R * math.cos(s), c.y + R * math.sin(s))
        end = Point(c.x + R * math.cos(s + sweep), c.y + R * math.sin(s + sweep))
        # keep exact guard coordinates when an endpoint coincides with an input endpoint
        for x in arcs:
            for p in (x.start, x.end):
                if dist(p, start) <= 1e-9 * max(1.0, R):
                    start = p
                if dist(p, end) <= 1e-9 * max(1.0, R):
                    end = p
        out.append(CircularArc(c, R, normalize_angle(s), sweep, start, end, a.provenance))
    return out


# ---------------------------------------------------------------------------
# Tunnel tracing (diagnostic)


@dataclass
class Tunnel:
    left: list  # guards met by the counterclockwise ray, in order
    right: list  # guards met by the clockwise ray, in order
    pairs: list  # (l, r) guard pairs simultaneously on the two rays
    l0: Point
    r0: Point
    arcs: list

    def check_pair_count(self) -> bool:
        return len(self.pairs) == len(self.left) + len(self.right) - 1


def trace_tunnel(start: ConeWitness, G, theta: float, max_steps: int = 10000) -> Tunnel:
    """Rotate an empty theta-cone clockwise while keeping both rays on guards.

    ``start`` must be an empty cone of extent ``theta`` with ``g_max`` on its
    clockwise ray and ``g_min`` on its counterclockwise ray. At every step the
    apex moves along the inscribed arc of the current pair until one ray meets a
    new guard, which then replaces the old guard on that ray. The trace stops
    when a ray would rotate past the current guard pair without a successor.
    """
    G = as_guard_set(G)
    xy = np.asarray(G.xy)
    lg, rg = start.g_min, start.g_max
    apex = start.apex
    left, right, pairs, arcs = [lg], [rg], [(lg, rg)], []
    for _ in range(max_steps):
        # apex runs along the arc over chord (rg, lg) clockwise around its circle
        circle = inscribed_arc(rg, lg, theta, "left")
        step = _next_event(circle, apex, lg, rg, theta, xy)
        if step is None:
            arcs.append(circle.sub_arc(lg, apex) if apex != lg else None)
            break
        t_apex, new_guard, which = step
        piece = circle.sub_arc(t_apex, apex) if t_apex != apex else None
        if piece is not None:
            arcs.append(piece)
        apex = t_apex
        if which == "left":
            lg = new_guard
            left.append(lg)
        else:
            rg = new_guard
            right.append(rg)
        pairs.append((lg, rg))
    return Tunnel(left, right, pairs, start.apex, apex, [a for a in arcs if a is not None])


def _next_event(circle: CircularArc, apex: Point, lg: Point, rg: Point, theta: float, xy: np.ndarray):
    """First apex position, moving clockwise along ``circle``, where a guard enters a ray."""
    c, R = circle.center, circle.radius
    a0 = direction(c, apex)
    # remaining clockwise travel before the apex reaches lg (the circle's end on this side)
    travel = (a0 - direction(c, lg)) % TWO_PI
    if travel <= 1e-12:
        return None
    best = None
    ts = np.linspace(0.0, travel, 257)[1:]
    prev = 0.0
    for t in ts:
        p = Point(c.x + R * math.cos(a0 - t), c.y + R * math.sin(a0 - t))
        hit = _cone_violator(p, lg, rg, theta, xy)
        if hit is not None:
            lo, hi = prev, t
            for _ in range(60):
                mid = 0.5 * (lo + hi)
                pm = Point(c.x + R * math.cos(a0 - mid), c.y + R * math.sin(a0 - mid))
                if _cone_violator(pm, lg, rg, theta, xy) is None:
                    lo = mid
                else:
                    hi = mid
            pe = Point(c.x + R * math.cos(a0 - lo), c.y + R * math.sin(a0 - lo))
            g, which = hit
            best = (pe, g, which)
            break
        prev = t
    return best


def _cone_violator(p: Point, lg: Point, rg: Point, theta: float, xy: np.ndarray):
    """A guard strictly inside the cone at ``p`` spanned toward ``rg`` .. ``lg``, if any."""
    a_r = math.atan2(rg.y - p.y, rg.x - p.x)
    ang = np.arctan2(xy[:, 1] - p.y, xy[:, 0] - p.x)
    off = np.mod(ang - a_r, TWO_PI)
    inside = (off > 1e-9) & (off < theta - 1e-9)
    if not inside.any():
        return None
    k = int(np.nonzero(inside)[0][np.argmin(np.hypot(xy[inside, 0] - p.x, xy[inside, 1] - p.y))])
    g = Point(*xy[k])
    which = "left" if off[k] > 0.5 * theta else "right"
    return g, which
