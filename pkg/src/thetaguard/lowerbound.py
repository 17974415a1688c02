"""Guard sets whose theta-region breaks into (2i+1)^2 pieces inside a central box.

The construction stamps unit-width guard cells along the four sides of the
square of half-width ``4i``. Cells in the middle of each side carry a thin
wanted tunnel whose deepest cone has its apex on the principal axis; the other
cells are closed off. The wanted tunnels from all four sides cut the central
square of half-width ``i`` into a grid of pieces. Tunnels that pair the top
opening of one cell with the middle opening of another (offset ``h``) are
blocked by one extra guard per slope class, placed far out along the medial
axis of the deepest such cones.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import ndimage

from .errors import GeometryError, VerificationError
from .geometry import Point, inscribed_arc
from .oracle import as_guard_set, guarded_mask

# strict-inclusion margin for the blocker placement tests (radians)
_ANGLE_MARGIN = 1e-9


def lower_bound_angle(i: int) -> float:
    """Apex angle of the wanted cones: the cell's top corners seen from the cell's axis foot."""
    return 2.0 * math.atan(1.0 / (8.0 * i))


@dataclass
class DeepestCone:
    apex: Point
    axis: float  # direction of the medial axis (radians)
    theta: float

    def contains(self, q, margin: float = _ANGLE_MARGIN) -> bool:
        """Strictly inside the open cone, with an angular margin."""
        a = math.atan2(q[1] - self.apex.y, q[0] - self.apex.x)
        off = (a - self.axis + math.pi) % (2 * math.pi) - math.pi
        return abs(off) < 0.5 * self.theta - margin


@dataclass
class LowerBoundInstance:
    i: int
    theta: float
    guards: np.ndarray
    boxes: dict  # half-widths: count, middle, outer, blocker
    expected_components: int
    first_step_guards: int
    blockers: int
    blocker_axes: list = field(default_factory=list)  # (offset h, "c" | "d", axis angle)

    @property
    def n(self) -> int:
        return len(self.guards)

    @property
    def count_box(self):
        w = self.boxes["count"]
        return ((-w, -w), (w, w))

    def to_json(self) -> dict:
        return {
            "i": self.i,
            "theta": self.theta,
            "n": self.n,
            "guards": self.guards.tolist(),
            "boxes": self.boxes,
            "expected_components": self.expected_components,
            "first_step_guards": self.first_step_guards,
            "blockers": self.blockers,
            "blocker_axes": [list(t) for t in self.blocker_axes],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1, sort_keys=True)

    @classmethod
    def from_json(cls, d: dict) -> "LowerBoundInstance":
        return cls(
            int(d["i"]),
            float(d["theta"]),
            np.asarray(d["guards"], dtype=float).reshape(-1, 2),
            dict(d["boxes"]),
            int(d["expected_components"]),
            int(d["first_step_guards"]),
            int(d["blockers"]),
            [tuple(t) for t in d.get("blocker_axes", [])],
        )


# ---------------------------------------------------------------------------
# First step


def _rotations(pts):
    """The four quarter-turn images of each point (exact for dyadic coordinates)."""
    out = []
    for x, y in pts:
        out.extend([(x, y), (-y, x), (-x, -y), (y, -x)])
    return out


def tunnel_cells(i: int) -> list:
    """Left edges of the cells that carry a wanted tunnel, left to right."""
    return list(range(-i, i))


def upper_half_guards(i: int) -> list:
    top, mid = 4.0 * i, 2.0 * i
    tunnel = set(tunnel_cells(i))
    pts = set()
    for k in range(-4 * i, 4 * i):
        if k in tunnel:
            pts.update(
                {
                    (k + 0.25, mid),
                    (k + 0.75, mid),
                    (float(k), top),
                    (k + 1.0, top),
                    (float(k), mid),
                    (k + 1.0, mid),
                }
            )
        else:
            pts.update({(float(k), top), (k + 0.5, top), (k + 1.0, top)})
    return sorted(pts)


def first_step_guards(i: int) -> list:
    return sorted(set(_rotations(upper_half_guards(i))))


# ---------------------------------------------------------------------------
# Deepest cones


def _ray_x(apex: Point, angle: float, y: float) -> float:
    return apex.x + (y - apex.y) * math.cos(angle) / math.sin(angle)


def _fits(apex: Point, axis: float, theta: float, top, mid, tol: float) -> bool:
    """Cone passes the top gap and the middle gap without containing their guards."""
    (a1, a2, y1), (b1, b2, y2) = top, mid
    lo, hi = axis + 0.5 * theta, axis - 0.5 * theta
    if not (0.0 < hi and lo < math.pi) or apex.y >= y2:
        return False
    return (
        _ray_x(apex, lo, y1) >= a1 - tol
        and _ray_x(apex, hi, y1) <= a2 + tol
        and _ray_x(apex, lo, y2) >= b1 - tol
        and _ray_x(apex, hi, y2) <= b2 + tol
    )


def _meet(p: Point, a: float, q: Point, b: float) -> Optional[Point]:
    ux, uy, vx, vy = math.cos(a), math.sin(a), math.cos(b), math.sin(b)
    den = ux * vy - uy * vx
    if abs(den) < 1e-15:
        return None
    t = ((q.x - p.x) * vy - (q.y - p.y) * vx) / den
    return Point(p.x + t * ux, p.y + t * uy)


def deepest_cone(top, mid, theta: float) -> DeepestCone:
    """Lowest-apex empty cone of apex angle ``theta`` opening upward through two gaps.

    ``top = (x_left, x_right, y)`` and ``mid`` likewise describe the gaps
    between guard pairs on two horizontal lines, ``mid`` below ``top``. At the
    optimum one ray carries two guards, or each ray carries one guard and the
    apex is the lowest point of their inscribed-angle circle; every such
    candidate is built and the lowest feasible one returned.
    """
    (a1, a2, y1), (b1, b2, y2) = top, mid
    L = [Point(a1, y1), Point(b1, y2)]
    R = [Point(a2, y1), Point(b2, y2)]
    tol = 1e-9 * max(1.0, abs(y1))
    cands = []
    # left ray through both left guards
    left_dir = math.atan2(y1 - y2, a1 - b1)
    for r in R:
        p = _meet(L[0], left_dir, r, left_dir - theta)
        if p is not None:
            cands.append((p, left_dir - 0.5 * theta))
    # right ray through both right guards
    right_dir = math.atan2(y1 - y2, a2 - b2)
    for l in L:
        p = _meet(R[0], right_dir, l, right_dir + theta)
        if p is not None:
            cands.append((p, right_dir + 0.5 * theta))
    # one guard per ray: lowest point of the circle seeing them at angle theta
    for l in L:
        for r in R:
            arc = inscribed_arc(r, l, theta, "left")
            if arc.contains_angle(-0.5 * math.pi, 1e-12):
                p = Point(arc.center.x, arc.center.y - arc.radius)
                cands.append((p, math.atan2(r.y - p.y, r.x - p.x) + 0.5 * theta))
    ok = [(p, ax) for p, ax in cands if _fits(p, ax, theta, top, mid, tol)]
    if not ok:
        raise GeometryError("no empty cone passes both gaps")
    p, ax = min(ok, key=lambda t: (t[0].y, t[0].x))
    return DeepestCone(p, ax, theta)


def deepest_cone_scan(top, mid, theta: float, samples: int = 20001) -> DeepestCone:
    """Same optimum by a dense scan over the axis direction (cross-check).

    For a fixed direction the lowest feasible apex height is the largest of
    four linear bounds, one per (left guard, right guard) pair.
    """
    (a1, a2, y1), (b1, b2, y2) = top, mid

    def lowest(axis):
        cl = 1.0 / math.tan(axis + 0.5 * theta)
        cr = 1.0 / math.tan(axis - 0.5 * theta)
        best = -math.inf
        for xl, yl in ((a1, y1), (b1, y2)):
            for xr, yr in ((a2, y1), (b2, y2)):
                best = max(best, (xr - xl - yr * cr + yl * cl) / (cl - cr))
        return best

    lo, hi = 0.5 * theta + 1e-9, math.pi - 0.5 * theta - 1e-9
    axes = np.linspace(lo, hi, samples)
    vals = np.array([lowest(a) for a in axes])
    k = int(np.argmin(vals))
    a, b = axes[max(k - 1, 0)], axes[min(k + 1, samples - 1)]
    for _ in range(100):  # golden-section refinement inside the bracket
        m1, m2 = a + 0.382 * (b - a), a + 0.618 * (b - a)
        if lowest(m1) <= lowest(m2):
            b = m2
        else:
            a = m1
    axis = 0.5 * (a + b)
    ay = lowest(axis)
    cl = 1.0 / math.tan(axis + 0.5 * theta)
    ax = max(a1 - (y1 - ay) * cl, b1 - (y2 - ay) * cl)
    return DeepestCone(Point(ax, ay), axis, theta)


def _gaps(i: int, top_cell: int, mid_cell: int):
    """Top gap of one tunnel cell and middle gap of another (cells counted from 1)."""
    k_top = tunnel_cells(i)[top_cell - 1]
    k_mid = tunnel_cells(i)[mid_cell - 1]
    return (float(k_top), k_top + 1.0, 4.0 * i), (k_mid + 0.25, k_mid + 0.75, 2.0 * i)


def unwanted_cone_classes(i: int, theta: Optional[float] = None) -> dict:
    """Deepest cones of every unwanted tunnel, grouped by offset and orientation.

    Class ``(h, "c")`` pairs the top gap of cell ``j`` with the middle gap of
    cell ``j + h``; class ``(h, "d")`` the other way round.
    """
    theta = lower_bound_angle(i) if theta is None else theta
    m = 2 * i
    out = {}
    for h in range(1, m):
        out[(h, "c")] = [deepest_cone(*_gaps(i, j, j + h), theta) for j in range(1, m - h + 1)]
        out[(h, "d")] = [deepest_cone(*_gaps(i, j + h, j), theta) for j in range(1, m - h + 1)]
    return out


def wanted_cones(i: int, theta: Optional[float] = None) -> list:
    theta = lower_bound_angle(i) if theta is None else theta
    return [DeepestCone(Point(k + 0.5, 0.0), 0.5 * math.pi, theta) for k in tunnel_cells(i)]


# ---------------------------------------------------------------------------
# Second step


def _blockers_upper(axes, half_width: float) -> list:
    return [(half_width * math.cos(a) / math.sin(a), half_width) for a in axes]


def _placement_problem(q, cls_cones, wanted) -> Optional[str]:
    for c in wanted:
        if c.contains(q, -_ANGLE_MARGIN):
            return "blocker inside a wanted cone"
    for c in cls_cones:
        if not c.contains(q):
            return "blocker outside a deepest cone of its class"
    return None


def generate(
    i: int,
    half_width: Optional[float] = None,
    max_half_width: float = 2.0**24,
    exclusion_check: bool = True,
) -> LowerBoundInstance:
    """Build the instance for ``i`` (``96 i - 4`` guards).

    The blocker box half-width starts at ``8 i`` (or ``half_width``) and is
    doubled until every blocker lies strictly outside all wanted cones and
    strictly inside all deepest cones of its class; with ``exclusion_check``
    the doubling continues until both the oracle raster and the exact region
    of the central box show the expected number of pieces.
    """
    if i < 1:
        raise ValueError("i must be a positive integer")
    theta = lower_bound_angle(i)
    first = first_step_guards(i)
    classes = unwanted_cone_classes(i, theta)
    wanted = wanted_cones(i, theta)
    keys = sorted(classes)
    axes = []
    for key in keys:
        cones = classes[key]
        spread = max(c.axis for c in cones) - min(c.axis for c in cones)
        if spread > 1e-9:
            raise GeometryError(f"deepest cones of class {key} differ in slope by {spread}")
        axes.append(cones[0].axis)

    X = float(half_width) if half_width is not None else 8.0 * i
    problem = None
    while X <= max_half_width:
        problem = None
        for key, axis, q in zip(keys, axes, _blockers_upper(axes, X)):
            why = _placement_problem(q, classes[key], wanted)
            if why is not None:
                problem = f"{why} {key} at half-width {X:g}"
                break
        if problem is None:
            inst = _assemble(i, theta, first, keys, axes, X)
            if not exclusion_check:
                return inst
            got = count_components_raster(inst)
            if got == inst.expected_components:
                # corridors thinner than the lattice spacing only show up exactly
                got = count_components_arrangement(inst)
                if got == inst.expected_components:
                    return inst
                problem = f"arrangement shows {got} pieces instead of {inst.expected_components} at half-width {X:g}"
            else:
                problem = f"raster shows {got} pieces instead of {inst.expected_components} at half-width {X:g}"
        X *= 2.0
    raise GeometryError(f"blocker box search exceeded half-width {max_half_width:g}: {problem}")


def _assemble(i, theta, first, keys, axes, X) -> LowerBoundInstance:
    blockers = _rotations(_blockers_upper(axes, X))
    guards = np.array(sorted(set(first) | set(blockers)), dtype=float)
    return LowerBoundInstance(
        i=i,
        theta=theta,
        guards=guards,
        boxes={"count": float(i), "middle": 2.0 * i, "outer": 4.0 * i, "blocker": X},
        expected_components=(2 * i + 1) ** 2,
        first_step_guards=len(first),
        blockers=len(blockers),
        blocker_axes=[(h, kind, a) for (h, kind), a in zip(keys, axes)],
    )


# ---------------------------------------------------------------------------
# Verification


def raster_lattice(i: int, per_unit: Optional[int] = None):
    """Interior lattice of the central box whose spacing puts every cone apex on a node.

    Spacing is ``1 / (2 q)`` so the half-integers are nodes; ``q`` is chosen so
    the box gets at least ``40 (2i + 1)`` cells per side and at least 120
    nodes per unit length (coarser grids split thin diagonal slivers).
    """
    q = per_unit or max(60, math.ceil(40 * (2 * i + 1) / (4 * i)))
    m = np.arange(-2 * i * q + 1, 2 * i * q)
    return m / (2.0 * q)


def count_components_raster(inst: LowerBoundInstance, per_unit: Optional[int] = None) -> int:
    """4-connected pieces of guarded lattice nodes strictly inside the central box."""
    xs = raster_lattice(inst.i, per_unit)
    X, Y = np.meshgrid(xs, xs)
    P = np.column_stack([X.ravel(), Y.ravel()])
    mask = guarded_mask(P, as_guard_set(inst.guards), inst.theta).reshape(X.shape)
    _, count = ndimage.label(mask)
    return int(count)


def count_components_arrangement(inst: LowerBoundInstance, tangent_backend: str = "naive") -> int:
    """Pieces of the computed region clipped to the central box."""
    from .arrangement import region_theta_lt_pi

    reg = region_theta_lt_pi(inst.guards, inst.theta, tangent_backend=tangent_backend, window=inst.count_box)
    return len(reg.components)


def verify_fragmentation(inst: LowerBoundInstance, method: str = "raster") -> int:
    if method == "raster":
        return count_components_raster(inst)
    if method == "arrangement":
        return count_components_arrangement(inst)
    if method == "both":
        a, b = count_components_raster(inst), count_components_arrangement(inst)
        if a != b:
            raise VerificationError(f"raster counts {a} pieces, arrangement counts {b}")
        return a
    raise ValueError(f"unknown verification method {method!r}")
