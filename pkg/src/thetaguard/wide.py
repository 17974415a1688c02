"""The theta-region for theta >= pi.

For theta = pi the region is the interior of the convex hull. For larger
theta a point p outside the hull is guarded iff the hull subtends more than
``phi = 2 pi - theta`` at p, so the boundary is traced by a wedge of opening
``phi`` whose two rays stay tangent to the hull while it rotates once around
it. While the pair of touched hull vertices ``(a, b)`` is fixed, the apex runs
along the inscribed-angle arc over ``ab``; the pair changes whenever a ray
direction passes a hull edge direction.
"""

from __future__ import annotations

import math

from .errors import GeometryError
from .geometry import TWO_PI, Point, convex_hull, direction, inscribed_arc, line_intersection
from .oracle import as_guard_set
from .region import Edge, Region, empty_region, whole_plane


def _tangent_index(edge_dirs, psi: float) -> int:
    """Hull vertex touched by a supporting line of direction ``psi`` with the hull on its left.

    Vertex ``i`` is touched for ``psi`` between the directions of its incoming
    edge ``i-1`` and outgoing edge ``i``.
    """
    k = len(edge_dirs)
    for i in range(k):
        lo = edge_dirs[i - 1]
        span = (edge_dirs[i] - lo) % TWO_PI
        if (psi - lo) % TWO_PI <= span:
            return i
    raise AssertionError("edge directions do not wind once")


def _apex(a: Point, b: Point, psi: float, phi: float) -> Point:
    u = (math.cos(psi), math.sin(psi))
    w = (math.cos(psi + phi), math.sin(psi + phi))
    p = line_intersection(a, u, b, w)
    assert p is not None
    return p


def wedge_phases(hull_vertices, phi: float):
    """Angular phases of the rotating wedge as ``(psi_start, psi_end, i, j)``.

    ``i`` indexes the vertex on the clockwise ray (direction ``psi``) and ``j``
    the vertex on the counterclockwise ray (direction ``psi + phi``).
    """
    vs = list(hull_vertices)
    k = len(vs)
    edge_dirs = [direction(vs[i], vs[(i + 1) % k]) for i in range(k)]
    cuts = sorted({d % TWO_PI for d in edge_dirs} | {(d - phi - math.pi) % TWO_PI for d in edge_dirs})
    phases = []
    for s, e in zip(cuts, cuts[1:] + [cuts[0] + TWO_PI]):
        if e - s <= 1e-15:
            continue
        mid = 0.5 * (s + e)
        i = _tangent_index(edge_dirs, mid % TWO_PI)
        j = _tangent_index(edge_dirs, (mid + phi + math.pi) % TWO_PI)
        phases.append((s, e, i, j))
    return phases


def region_theta_ge_pi(G, theta: float) -> Region:
    """Closed-form region for ``theta`` in ``[pi, 2 pi]``."""
    G = as_guard_set(G)
    if not math.pi - 1e-12 <= theta <= TWO_PI + 1e-12:
        raise GeometryError("theta must lie in [pi, 2pi]")
    if theta >= TWO_PI - 1e-12:
        return whole_plane(theta)
    if G.n < 2:
        raise GeometryError("need at least two guards for theta >= pi")
    hull = convex_hull(G.guards)
    if abs(theta - math.pi) <= 1e-12:
        if len(hull) < 3:
            return empty_region(theta)
        return Region.polygon(hull.vertices, theta)

    phi = TWO_PI - theta
    vs = hull.vertices  # a 2-gon walks both directed edges
    chain = []
    for s, e, i, j in wedge_phases(vs, phi):
        a, b = vs[i], vs[j]
        if a == b:
            continue  # apex parked on a hull vertex
        p0, p1 = _apex(a, b, s, phi), _apex(a, b, e, phi)
        circle = inscribed_arc(a, b, phi, "left")
        edge = Edge.arc(circle.center, circle.radius, p0, p1, ccw=True)
        mid = _apex(a, b, 0.5 * (s + e), phi)
        if not _on_edge(edge, mid):
            edge = Edge.arc(circle.center, circle.radius, p0, p1, ccw=False)
        chain.append(edge)
    return Region((tuple(chain),), theta)


def _on_edge(e: Edge, p: Point) -> bool:
    arc = e.as_ccw_arc()
    return arc.contains_angle(direction(arc.center, p), 1e-12)
