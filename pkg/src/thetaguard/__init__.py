"""Theta-guarded regions of planar guard sets."""

from .arcgen import CandidateArcSet, find_tangent_guard, generate_candidate_arcs, trace_tunnel
from .arrangement import build_arrangement, classify_faces, extract_region, region_theta_lt_pi
from .errors import (
    DegeneracyError,
    EmptyGuardSetError,
    GeometryError,
    PreconditionError,
    ThetaGuardError,
    VerificationError,
)
from .geometry import (
    CircularArc,
    CircularSegment,
    ConvexHull,
    Point,
    angle_at,
    arc_arc_intersections,
    arc_line_intersections,
    convex_hull,
    inscribed_arc,
)
from .lowerbound import LowerBoundInstance, generate, verify_fragmentation
from .oracle import (
    ConeWitness,
    GuardSet,
    Raster,
    batch_unguarded,
    is_theta_guarded,
    max_empty_cone,
    max_empty_cone_angle,
    maximal_empty_cones,
    rasterize,
)
from .partition import PartitionTree
from .pipeline import regime, theta_region
from .region import Edge, Region
from .wide import region_theta_ge_pi

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
