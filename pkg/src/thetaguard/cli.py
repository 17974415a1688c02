"""Command-line interface.

Exit codes: 0 ok, 2 input error, 3 numerical degeneracy, 4 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Optional, Sequence

import numpy as np

from .arrangement import REL_TOL
from .errors import DegeneracyError, EmptyGuardSetError, GeometryError, ThetaGuardError, VerificationError
from .geometry import TWO_PI
from .oracle import ANGLE_EPS, Raster, as_guard_set, cell_centers, max_empty_cone, max_empty_cone_angles, padded_bbox

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_DEGENERATE = 3
EXIT_VERIFY = 4


class InputError(ThetaGuardError):
    pass


# ---------------------------------------------------------------------------
# Parsing


def parse_theta(text: str) -> float:
    """Radians, or degrees with a ``deg`` suffix; must lie in (0, 2 pi]."""
    s = text.strip().lower()
    try:
        value = math.radians(float(s[:-3])) if s.endswith("deg") else float(s)
    except ValueError:
        raise InputError(f"cannot parse angle {text!r}") from None
    if not math.isfinite(value) or not 0.0 < value <= TWO_PI + 1e-12:
        raise InputError(f"theta must lie in (0, 2pi], got {text!r}")
    return min(value, TWO_PI)


def parse_resolution(text: str) -> tuple:
    parts = text.lower().replace("x", ",").split(",")
    try:
        cols, rows = (int(parts[0]), int(parts[-1]))
    except ValueError:
        raise InputError(f"cannot parse resolution {text!r}") from None
    if cols < 2 or rows < 2:
        raise InputError("resolution must be at least 2x2")
    return cols, rows


def _rows_from_csv(text: str, what: str) -> np.ndarray:
    pts = []
    for lineno, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        cells = [c.strip() for c in row if c.strip()]
        if not cells or cells[0].startswith("#"):
            continue
        try:
            x, y = (float(c) for c in cells)
        except ValueError:
            if lineno == 1 and not pts:
                continue  # header line such as "x,y"
            raise InputError(f"{what}: line {lineno} is not an x,y pair") from None
        pts.append((x, y))
    return np.asarray(pts, dtype=float).reshape(-1, 2)


def read_points(path: str, key: str = "guards") -> np.ndarray:
    """Points from CSV (``x,y`` per line) or JSON (``{"guards": [[x, y], ...]}``)."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    if path.lower().endswith(".json") or text.lstrip().startswith(("{", "[")):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}: invalid JSON ({exc.msg})") from None
        rows = data.get(key, data.get("points")) if isinstance(data, dict) else data
        try:
            pts = np.asarray(rows, dtype=float).reshape(-1, 2)
        except (TypeError, ValueError):
            raise InputError(f"{path}: expected a list of [x, y] pairs under {key!r}") from None
    else:
        pts = _rows_from_csv(text, path)
    if not np.all(np.isfinite(pts)):
        raise InputError(f"{path}: coordinates must be finite")
    return pts


def read_guards(path: str):
    G = as_guard_set(read_points(path))
    if G.n == 0:
        raise EmptyGuardSetError()
    return G


def _write_text(path: Optional[str], text: str) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text if text.endswith("\n") else text + "\n")


def _dumps(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=True)


# ---------------------------------------------------------------------------
# Shared pieces


def _tangent_backend(args) -> str:
    return "naive" if args.naive else "partition-tree"


def threaded_raster(G, theta: float, bbox, cols: int, rows: int, threads: int = 1) -> Raster:
    """Oracle raster evaluated in row blocks; identical for any thread count."""
    X, Y = cell_centers(bbox, cols, rows)
    P = np.column_stack([X.ravel(), Y.ravel()])
    blocks = np.array_split(np.arange(len(P)), max(1, threads * 4))
    work = lambda ix: max_empty_cone_angles(P[ix], G)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(work, blocks))
    else:
        parts = [work(ix) for ix in blocks]
    f = np.concatenate(parts).reshape(rows, cols)
    return Raster(bbox, cols, rows, theta, f, f < theta - ANGLE_EPS)


def compute_region(G, theta: float, args):
    from .pipeline import theta_region

    return theta_region(
        G,
        theta,
        tangent_backend=_tangent_backend(args),
        classify_backend="batch" if args.batch else "oracle",
        r=args.r,
        rel_tol=args.eps if args.eps is not None else REL_TOL,
    )


def _witness_json(w) -> dict:
    return {
        "apex": list(w.apex),
        "start": w.start,
        "extent": w.extent,
        "g_min": None if w.g_min is None else list(w.g_min),
        "g_max": None if w.g_max is None else list(w.g_max),
    }


# ---------------------------------------------------------------------------
# Commands


def cmd_region(args) -> int:
    G = read_guards(args.input)
    theta = parse_theta(args.theta)
    region = compute_region(G, theta, args)
    out = region.to_json()
    out["guards"] = G.n
    fmt = args.format or (args.out.rsplit(".", 1)[-1].lower() if args.out and "." in args.out else "json")
    arcs = ()
    if args.dump_arcs or args.draw_arcs:
        from .arcgen import generate_candidate_arcs

        if 0.0 < theta < math.pi:
            cand = generate_candidate_arcs(G, theta, _tangent_backend(args), args.r)
            arcs = cand.arcs
            if args.dump_arcs:
                _write_text(args.dump_arcs, cand.dumps())
        elif args.dump_arcs:
            _write_text(args.dump_arcs, _dumps({"theta": theta, "arcs": [], "note": "candidate arcs exist only for theta < pi"}))
    if fmt == "svg":
        from .report import write_region_svg

        write_region_svg(args.out, region, G.xy, arcs if args.draw_arcs else ())
    else:
        _write_text(args.out, _dumps(out))
    if args.svg:
        from .report import write_region_svg

        write_region_svg(args.svg, region, G.xy, arcs if args.draw_arcs else ())
    return EXIT_OK


def cmd_query(args) -> int:
    G = read_guards(args.input)
    theta = parse_theta(args.theta)
    pts = []
    for text in args.point or []:
        try:
            x, y = (float(v) for v in text.split(","))
        except ValueError:
            raise InputError(f"cannot parse point {text!r}") from None
        pts.append((x, y))
    if args.points:
        pts.extend(map(tuple, read_points(args.points, key="points")))
    if not pts:
        raise InputError("no query points given (use --point x,y or --points FILE)")
    lines = []
    for p in pts:
        w = max_empty_cone(p, G)
        guarded = w.extent < theta - ANGLE_EPS
        rec = {"point": list(p), "f": w.extent, "guarded": bool(guarded)}
        if not guarded:
            rec["witness"] = _witness_json(w)
        lines.append(json.dumps(rec, sort_keys=True))
    _write_text(args.out, "\n".join(lines))
    return EXIT_OK


def cmd_rasterize(args) -> int:
    from .report import pgm_text, write_raster_svg

    G = read_guards(args.input)
    theta = parse_theta(args.theta)
    cols, rows = parse_resolution(args.resolution)
    bbox = _parse_bbox(args.bbox) if args.bbox else padded_bbox(G, 0.1)
    raster = threaded_raster(G, theta, bbox, cols, rows, args.threads)
    fmt = args.format or (args.out.rsplit(".", 1)[-1].lower() if args.out and "." in args.out else "pgm")
    if fmt == "svg":
        if not args.out or args.out == "-":
            raise InputError("SVG output needs --out FILE")
        write_raster_svg(args.out, raster, G.xy, args.values)
    elif fmt == "pgm":
        _write_text(args.out, pgm_text(raster, args.values))
    else:
        raise InputError(f"unknown raster format {fmt!r}")
    print(f"guarded cells: {int(raster.guarded.sum())} / {cols * rows}, components: {raster.components()}", file=sys.stderr)
    return EXIT_OK


def _parse_bbox(text: str):
    try:
        x0, y0, x1, y1 = (float(v) for v in text.split(","))
    except ValueError:
        raise InputError(f"bbox must be xmin,ymin,xmax,ymax, got {text!r}") from None
    if not (x1 > x0 and y1 > y0):
        raise InputError("bbox must have positive extent")
    return (x0, y0), (x1, y1)


def cmd_lowerbound(args) -> int:
    from .lowerbound import generate, verify_fragmentation

    if args.i < 1:
        raise InputError("--i must be a positive integer")
    inst = generate(args.i)
    _write_text(args.out, inst.dumps())
    if args.verify:
        got = verify_fragmentation(inst, args.verify)
        ok = got == inst.expected_components
        print(f"{'PASS' if ok else 'FAIL'} components={got} expected={inst.expected_components} guards={inst.n}")
        if not ok:
            return EXIT_VERIFY
    return EXIT_OK


def cmd_verify(args) -> int:
    """Oracle agreement of the computed region, or fragmentation of an instance."""
    try:
        with open(args.input, encoding="utf-8") as fh:
            data = json.load(fh) if args.input.lower().endswith(".json") else None
    except (OSError, json.JSONDecodeError):
        data = None
    if isinstance(data, dict) and "expected_components" in data:
        from .lowerbound import LowerBoundInstance, verify_fragmentation

        inst = LowerBoundInstance.from_json(data)
        got = verify_fragmentation(inst, args.method)
        ok = got == inst.expected_components
        print(f"{'PASS' if ok else 'FAIL'} fragmentation components={got} expected={inst.expected_components}")
        return EXIT_OK if ok else EXIT_VERIFY

    if args.theta is None:
        raise InputError("--theta is required to verify a guard set")
    G = read_guards(args.input)
    theta = parse_theta(args.theta)
    checks = verify_region(G, theta, args)
    for name, ok, detail in checks:
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    return EXIT_OK if all(ok for _, ok, _ in checks) else EXIT_VERIFY


def verify_region(G, theta: float, args) -> list:
    from .oracle import guarded_mask

    region = compute_region(G, theta, args)
    rng = np.random.default_rng(args.seed)
    (x0, y0), (x1, y1) = padded_bbox(G, 0.1)
    P = np.column_stack([rng.uniform(x0, x1, args.probes), rng.uniform(y0, y1, args.probes)])
    diam = math.hypot(x1 - x0, y1 - y0)
    checks = []
    if region.whole_plane:
        far = np.ones(len(P), dtype=bool)
    else:
        far = region.boundary_distance(P) > args.margin * diam
    inside = region.contains(P[far])
    truth = guarded_mask(P[far], G, theta)
    bad = int(np.sum(inside != truth))
    checks.append(("oracle agreement", bad == 0, f"{bad} disagreements over {int(far.sum())} probes"))
    checks.append(("closed chains", region.check_closed(), f"{len(region.chains)} chains"))
    checks.append(("no holes", not region.holes, f"{len(region.holes)} clockwise chains"))
    if theta >= math.pi and not region.whole_plane:
        checks.append(("connected", len(region.components) <= 1, f"{len(region.components)} components"))
    return checks


def cmd_bench(args) -> int:
    from .arcgen import generate_candidate_arcs
    from .report import loglog_slope, save_figure, scaling_figure, write_csv

    ns = [int(v) for v in args.n.split(",")]
    thetas = [parse_theta(v) for v in args.thetas.split(",")]
    rng = np.random.default_rng(args.seed)
    rows = []
    for theta in thetas:
        for n in ns:
            G = as_guard_set(rng.random((n, 2)))
            t0 = time.perf_counter()
            cand = generate_candidate_arcs(G, theta, _tangent_backend(args), args.r) if theta < math.pi else None
            t1 = time.perf_counter()
            region = None if args.arcs_only else compute_region(G, theta, args)
            t2 = time.perf_counter()
            arcs = len(cand) if cand is not None else 0
            meta = region.meta if region is not None else {}
            rows.append(
                [
                    n,
                    theta,
                    arcs,
                    arcs * theta / n,
                    meta.get("psi", ""),
                    meta.get("mu", ""),
                    "" if region is None else len(region.components),
                    "" if region is None else region.edge_count,
                    round(t1 - t0, 4),
                    round(t2 - t1, 4),
                ]
            )
            print(",".join(str(v) for v in rows[-1]))
    header = ["n", "theta", "arcs", "arcs_theta_over_n", "psi", "mu", "components", "boundary_edges", "arc_seconds", "region_seconds"]
    if args.out:
        write_csv(args.out, header, rows)
    if args.figures:
        os.makedirs(args.figures, exist_ok=True)
        for theta in thetas:
            sel = [r for r in rows if r[1] == theta and r[2]]
            if len(sel) >= 2:
                xs, ys = [r[0] for r in sel], [r[2] for r in sel]
                fig = scaling_figure(xs, ys, "guards n", "candidate arcs", f"theta={theta:.4f} slope={loglog_slope(xs, ys):.3f}")
                save_figure(fig, os.path.join(args.figures, f"arcs_theta_{theta:.4f}.{args.figure_format}"))
    return EXIT_OK


# ---------------------------------------------------------------------------
# Entry point


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="thetaguard", description="Theta-guarded regions of planar guard sets.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, needs_theta=True):
        sp.add_argument("input", help="guard file: CSV x,y lines or JSON {\"guards\": [[x, y], ...]}")
        if needs_theta:
            sp.add_argument("--theta", required=True, help="cone angle in radians, or degrees with a deg suffix")
        sp.add_argument("--out", "-o", help="output file (default stdout)")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--threads", type=int, default=1)

    def backends(sp):
        sp.add_argument("--naive", action="store_true", help="linear-scan tangent queries instead of the partition tree")
        sp.add_argument("--batch", action="store_true", help="classify faces with the batched sweep instead of per-point tests")
        sp.add_argument("--r", type=int, default=8, help="partition tree branching factor")
        sp.add_argument("--eps", type=float, default=None, help=f"relative snapping tolerance (default {REL_TOL:g})")

    sp = sub.add_parser("region", help="compute the theta-region")
    common(sp)
    backends(sp)
    sp.add_argument("--format", choices=("json", "svg"))
    sp.add_argument("--svg", help="also write an SVG drawing")
    sp.add_argument("--dump-arcs", help="write the candidate arc set as JSON")
    sp.add_argument("--draw-arcs", action="store_true", help="overlay candidate arcs in SVG output")
    sp.set_defaults(func=cmd_region)

    sp = sub.add_parser("query", help="guardedness of individual points")
    common(sp)
    sp.add_argument("--point", action="append", help="query point x,y (repeatable)")
    sp.add_argument("--points", help="file of query points (CSV or JSON {\"points\": ...})")
    sp.set_defaults(func=cmd_query)

    sp = sub.add_parser("rasterize", help="raster of f or of the guarded mask")
    common(sp)
    sp.add_argument("--resolution", default="200x200", help="COLSxROWS")
    sp.add_argument("--bbox", help="xmin,ymin,xmax,ymax (default: padded guard box)")
    sp.add_argument("--values", choices=("f", "mask"), default="f")
    sp.add_argument("--format", choices=("pgm", "svg"))
    sp.set_defaults(func=cmd_rasterize)

    sp = sub.add_parser("lowerbound", help="generate a fragmentation instance")
    sp.add_argument("--i", type=int, required=True)
    sp.add_argument("--out", "-o")
    sp.add_argument("--verify", choices=("raster", "arrangement", "both"))
    sp.set_defaults(func=cmd_lowerbound)

    sp = sub.add_parser("verify", help="oracle-agreement checks for a guard set or instance")
    sp.add_argument("input")
    sp.add_argument("--theta", help="required unless the input is a lower-bound instance")
    sp.add_argument("--probes", type=int, default=10000)
    sp.add_argument("--margin", type=float, default=1e-6, help="probe exclusion band, relative to the box diagonal")
    sp.add_argument("--method", choices=("raster", "arrangement", "both"), default="both")
    sp.add_argument("--seed", type=int, default=0)
    backends(sp)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("bench", help="candidate-arc and region statistics on random guard sets")
    sp.add_argument("--n", default="100,200,400")
    sp.add_argument("--thetas", default="1.5707963267948966")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", "-o", help="CSV table")
    sp.add_argument("--figures", help="directory for log-log figures")
    sp.add_argument("--figure-format", choices=("svg", "png"), default="svg")
    sp.add_argument("--arcs-only", action="store_true", help="skip the arrangement stage")
    backends(sp)
    sp.set_defaults(func=cmd_bench)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except VerificationError as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except DegeneracyError as exc:
        print(f"degeneracy: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (InputError, GeometryError, ValueError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
