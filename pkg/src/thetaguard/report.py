"""File outputs: region and raster figures (SVG/PNG), PGM rasters and CSV tables.

Figures go through matplotlib's Agg backend with the creation date removed
and a fixed SVG id salt, so the same input always yields the same bytes.
"""

from __future__ import annotations

import csv
import io
import math
from typing import Iterable, Optional, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from matplotlib.patches import PathPatch  # noqa: E402
from matplotlib.path import Path  # noqa: E402

from .geometry import TWO_PI  # noqa: E402
from .oracle import Raster  # noqa: E402
from .region import Region  # noqa: E402

_SVG_SALT = "thetaguard"
_STYLE = {
    "svg.hashsalt": _SVG_SALT,
    "svg.fonttype": "none",
    "path.simplify": False,
    "font.size": 9,
}


def _metadata(fmt: str) -> dict:
    if fmt == "svg":
        return {"Date": None, "Creator": "thetaguard"}
    if fmt == "png":
        return {"Software": "thetaguard"}
    if fmt == "pdf":
        return {"CreationDate": None, "ModDate": None, "Creator": "thetaguard", "Producer": "thetaguard"}
    return {}


def save_figure(fig, path: str) -> None:
    fmt = path.rsplit(".", 1)[-1].lower()
    with plt.rc_context(_STYLE):
        fig.savefig(path, format=fmt, metadata=_metadata(fmt), bbox_inches=None)
    plt.close(fig)


def figure_bytes(fig, fmt: str = "svg") -> bytes:
    buf = io.BytesIO()
    with plt.rc_context(_STYLE):
        fig.savefig(buf, format=fmt, metadata=_metadata(fmt))
    plt.close(fig)
    return buf.getvalue()


# ---------------------------------------------------------------------------
# Region drawing


def chain_path(chain, per_radian: int = 64) -> Path:
    """A closed matplotlib path through densely sampled edge points."""
    pts = []
    for e in chain:
        n = max(2, int(math.ceil(e.sweep * per_radian)) + 1) if e.is_arc else 2
        pts.extend(e.sample(n)[:-1])
    pts.append(pts[0])
    codes = [Path.MOVETO] + [Path.LINETO] * (len(pts) - 2) + [Path.CLOSEPOLY]
    return Path(np.asarray(pts, dtype=float), codes)


def _region_bbox(region: Optional[Region], guards: np.ndarray, pad: float = 0.08):
    pts = [guards] if len(guards) else []
    if region is not None and region.chains:
        pts.append(region.sample_boundary(8))
    if not pts:
        return (-1.0, -1.0), (1.0, 1.0)
    allp = np.vstack(pts)
    lo, hi = allp.min(axis=0), allp.max(axis=0)
    span = max(float(np.max(hi - lo)), 1e-9)
    return tuple(lo - pad * span), tuple(hi + pad * span)


def region_figure(
    region: Optional[Region],
    guards,
    arcs: Sequence = (),
    bbox=None,
    title: Optional[str] = None,
    size: float = 6.0,
):
    """Guards, filled region and (optionally) the candidate arcs."""
    guards = np.asarray(guards, dtype=float).reshape(-1, 2)
    (x0, y0), (x1, y1) = bbox or _region_bbox(region, guards)
    fig, ax = plt.subplots(figsize=(size, size))
    if region is not None and region.whole_plane:
        ax.add_patch(plt.Rectangle((x0, y0), x1 - x0, y1 - y0, color="#9ecae1", lw=0))
    elif region is not None and region.chains:
        verts, codes = [], []
        for c in region.chains:
            p = chain_path(c)
            verts.append(p.vertices)
            codes.append(p.codes)
        path = Path(np.vstack(verts), np.concatenate(codes))
        ax.add_patch(PathPatch(path, facecolor="#9ecae1", edgecolor="#08519c", lw=0.8))
    for a in arcs:
        t = np.linspace(a.start_angle, a.start_angle + a.sweep, max(2, int(a.sweep * 64) + 1))
        ax.plot(a.center.x + a.radius * np.cos(t), a.center.y + a.radius * np.sin(t), color="#d95f02", lw=0.4)
    if len(guards):
        ax.plot(guards[:, 0], guards[:, 1], "k.", ms=3)
    ax.set_xlim(x0, x1)
    ax.set_ylim(y0, y1)
    ax.set_aspect("equal")
    if title:
        ax.set_title(title)
    return fig


def write_region_svg(path: str, region: Optional[Region], guards, arcs: Sequence = (), bbox=None, title=None) -> None:
    save_figure(region_figure(region, guards, arcs, bbox, title), path)


# ---------------------------------------------------------------------------
# Rasters


def raster_figure(raster: Raster, guards=None, values: str = "f", size: float = 6.0):
    """Heat map of ``f`` (or the guarded mask) with row 0 at the bottom."""
    (x0, y0), (x1, y1) = raster.bbox
    fig, ax = plt.subplots(figsize=(size, size * (y1 - y0) / max(x1 - x0, 1e-12)))
    if values == "f":
        im = ax.imshow(
            np.minimum(raster.f, TWO_PI),
            origin="lower",
            extent=(x0, x1, y0, y1),
            cmap="viridis",
            vmin=0.0,
            vmax=TWO_PI,
            interpolation="nearest",
        )
        fig.colorbar(im, ax=ax, label="widest empty cone (rad)")
        if raster.f.min() < raster.theta < raster.f.max():
            ax.contour(*raster.centers(), raster.f, levels=[raster.theta], colors="w", linewidths=0.6)
    else:
        ax.imshow(raster.guarded, origin="lower", extent=(x0, x1, y0, y1), cmap="Greys", interpolation="nearest")
    if guards is not None:
        g = np.asarray(guards, dtype=float).reshape(-1, 2)
        ax.plot(g[:, 0], g[:, 1], "r.", ms=3)
    ax.set_xlim(x0, x1)
    ax.set_ylim(y0, y1)
    ax.set_aspect("equal")
    return fig


def write_raster_svg(path: str, raster: Raster, guards=None, values: str = "f") -> None:
    save_figure(raster_figure(raster, guards, values), path)


def pgm_text(raster: Raster, values: str = "f") -> str:
    """ASCII PGM (P2); ``f`` is scaled from [0, 2 pi] to 0..255, the mask to {0, 255}.

    The image's first row is the raster's top row.
    """
    if values == "f":
        img = np.rint(np.clip(raster.f, 0.0, TWO_PI) / TWO_PI * 255.0).astype(int)
    else:
        img = np.where(raster.guarded, 255, 0)
    img = img[::-1]
    lines = ["P2", f"{raster.cols} {raster.rows}", "255"]
    lines.extend(" ".join(str(v) for v in row) for row in img)
    return "\n".join(lines) + "\n"


def read_pgm(text: str) -> np.ndarray:
    tokens = [t for line in text.splitlines() if not line.startswith("#") for t in line.split()]
    if tokens[0] != "P2":
        raise ValueError("not an ASCII PGM")
    cols, rows, _ = int(tokens[1]), int(tokens[2]), int(tokens[3])
    return np.array(tokens[4 : 4 + cols * rows], dtype=int).reshape(rows, cols)


def write_pgm(path: str, raster: Raster, values: str = "f") -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(pgm_text(raster, values))


# ---------------------------------------------------------------------------
# Tables


def write_csv(path: str, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(v) for v in r])


def _fmt(v):
    if isinstance(v, float):
        return repr(v) if math.isfinite(v) else str(v)
    return v


def loglog_slope(xs, ys) -> float:
    """Least-squares slope of ``log y`` against ``log x``."""
    lx, ly = np.log(np.asarray(xs, dtype=float)), np.log(np.asarray(ys, dtype=float))
    return float(np.polyfit(lx, ly, 1)[0])


def scaling_figure(xs, ys, xlabel: str, ylabel: str, title: Optional[str] = None):
    fig, ax = plt.subplots(figsize=(4.5, 3.5))
    ax.loglog(xs, ys, "o-", color="#08519c")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    return fig
