"""Regime dispatch: one entry point for every theta in (0, 2 pi]."""

from __future__ import annotations

import math

from .arrangement import REL_TOL, region_theta_lt_pi
from .errors import EmptyGuardSetError, GeometryError
from .geometry import TWO_PI
from .oracle import as_guard_set
from .region import Region, empty_region, whole_plane
from .wide import region_theta_ge_pi

# theta within this of pi or 2 pi is snapped onto it
_REGIME_SNAP = 1e-12


def regime(theta: float) -> str:
    """``"arrangement"`` below pi, ``"wide"`` on [pi, 2 pi), ``"plane"`` at 2 pi."""
    if not (theta > 0.0 and theta <= TWO_PI + _REGIME_SNAP):
        raise GeometryError(f"theta must lie in (0, 2pi], got {theta!r}")
    if theta >= TWO_PI - _REGIME_SNAP:
        return "plane"
    if theta >= math.pi - _REGIME_SNAP:
        return "wide"
    return "arrangement"


def theta_region(
    G,
    theta: float,
    tangent_backend: str = "naive",
    classify_backend: str = "oracle",
    r: int = 8,
    rel_tol: float = REL_TOL,
) -> Region:
    """The theta-region of ``G``.

    The whole plane at 2 pi is returned as a sentinel record even for a single
    guard; an empty guard set is rejected.
    """
    G = as_guard_set(G)
    if G.n == 0:
        raise EmptyGuardSetError()
    kind = regime(theta)
    if kind == "plane":
        return whole_plane(TWO_PI)
    if G.n < 2:
        return empty_region(theta)  # f = 2 pi everywhere off the guard
    if kind == "wide":
        return region_theta_ge_pi(G, max(theta, math.pi))
    if G.n == 2:
        return empty_region(theta)  # collinear: f >= pi everywhere
    if theta <= TWO_PI / G.n:
        return empty_region(theta)  # n directions always leave a gap of at least 2 pi / n
    return region_theta_lt_pi(G, theta, tangent_backend, classify_backend, r=r, rel_tol=rel_tol)
