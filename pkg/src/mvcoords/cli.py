"""Command line front end for the coordinate and solver tools.

Subcommands: ``eval`` dumps coordinate values and gradients at points,
``check-polygon`` reports quality constants against thresholds,
``pentagon-study`` compares sup-gradient growth across the flattening
pentagon family, ``converge`` runs the Poisson convergence study, and
``properties`` runs the randomized invariant audit.

Every command is deterministic given its flags; re-runs write
byte-identical output. Tables carry 6 significant digits, JSON carries
full precision.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .audit import run_property_audit
from .coords import (
    mvc_gradients,
    mvc_values,
    sup_gradient_scan,
    wachspress_gradients,
    wachspress_values,
)
from .errors import NoConvergence, OutsidePolygon, PointTooCloseToBoundary
from .fem import convergence_study
from .geometry import (
    apex_pentagon,
    geometric_constants,
    load_polygon,
    normalize_to_unit_diameter,
)


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _bbox_lattice(p, n: int) -> np.ndarray:
    """n-by-n inclusive lattice over the bounding box, raster order."""
    x0, y0, x1, y1 = p.bbox
    xs = np.linspace(x0, x1, n)
    ys = np.linspace(y0, y1, n)
    gx, gy = np.meshgrid(xs, ys)
    return np.column_stack([gx.ravel(), gy.ravel()])


def _coordinate_functions(kind: str):
    if kind == "mvc":
        return mvc_values, mvc_gradients
    return wachspress_values, wachspress_gradients


def cmd_eval(args: argparse.Namespace) -> int:
    """Per-point CSV dump of coordinates and their gradients.

    Points that fail (outside the polygon, or too close to the boundary
    for a gradient) keep their row with the failure named in the status
    column; the run continues.
    """
    fixed = []
    for text in args.point:
        parts = text.split(",")
        if len(parts) != 2:
            raise ValueError(f"--point wants X,Y, got {text!r}")
        fixed.append((float(parts[0]), float(parts[1])))
    if not fixed and not args.grid:
        raise ValueError("eval needs --point and/or --grid")
    if args.grid and args.grid < 2:
        raise ValueError("--grid must be at least 2")

    p = load_polygon(args.polygon)
    pts = np.asarray(fixed, dtype=float).reshape(-1, 2)
    if args.grid:
        pts = np.concatenate([pts, _bbox_lattice(p, args.grid)])
    val_fn, grad_fn = _coordinate_functions(args.kind)

    n = len(p.vertices)
    header = ["x", "y", "status"]
    for i in range(n):
        header += [f"lambda_{i}", f"grad_x_{i}", f"grad_y_{i}"]
    lines = [",".join(header)]
    for x, y in pts:
        cells = [""] * (3 * n)
        status = "ok"
        try:
            lam = val_fn(p, [[x, y]])[0]
            for i in range(n):
                cells[3 * i] = f"{lam[i]:.6g}"
            grad = grad_fn(p, [[x, y]]).gradients[0]
            for i in range(n):
                cells[3 * i + 1] = f"{grad[i, 0]:.6g}"
                cells[3 * i + 2] = f"{grad[i, 1]:.6g}"
        except (OutsidePolygon, PointTooCloseToBoundary) as exc:
            status = type(exc).__name__
        lines.append(f"{x:.6g},{y:.6g},{status}," + ",".join(cells))
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_check_polygon(args: argparse.Namespace) -> int:
    """Quality constants and PASS/FAIL against the supplied thresholds.

    Constants are reported after scaling the polygon to unit diameter, so
    the thresholds mean the same thing for every input. Exit code 0 only
    when both checks pass.
    """
    p = load_polygon(args.polygon)
    q, _ = normalize_to_unit_diameter(p)
    gc = geometric_constants(q)
    g1 = gc.aspect_ratio <= args.gamma_star
    g2 = gc.min_edge >= args.d_star
    lines = [
        f"vertices    {len(q.vertices)}",
        f"gamma       {gc.aspect_ratio:.6g}",
        f"d_min       {gc.min_edge:.6g}",
        f"beta_min    {gc.beta_min:.6g}",
        f"beta_max    {gc.beta_max:.6g}",
        f"h_star      {gc.h_star:.6g}",
        f"alpha_star  {gc.alpha_star:.6g}",
        f"G1 (gamma <= {args.gamma_star:g}): {'PASS' if g1 else 'FAIL'}",
        f"G2 (d_min >= {args.d_star:g}): {'PASS' if g2 else 'FAIL'}",
    ]
    _emit("\n".join(lines) + "\n", args.out)
    return 0 if g1 and g2 else 1


def cmd_pentagon_study(args: argparse.Namespace) -> int:
    """Sup-gradient comparison over the square-with-apex pentagon family.

    One CSV row per (apex, kind) pair. The optional surface dump writes the
    apex vertex's basis values and gradients on the interior part of a
    bounding-box lattice, for plotting.
    """
    apexes = [float(s) for s in args.apex.split(",")]
    if any(a <= 1.0 for a in apexes):
        raise ValueError("apex heights must exceed 1")
    if args.grid < 8:
        raise ValueError("--grid must be at least 8")

    rows = ["apex,kind,max_grad_norm"]
    surface = ["apex,kind,x,y,lambda,grad_x,grad_y"] if args.surface else None
    for a in apexes:
        p = apex_pentagon(a)
        for kind in ("mvc", "wachspress"):
            scan = sup_gradient_scan(p, kind=kind, resolution=args.grid, margin=args.margin)
            rows.append(f"{a:g},{kind},{scan.overall_max:.6g}")
            if surface is None:
                continue
            _, grad_fn = _coordinate_functions(kind)
            apex_i = len(p.vertices) - 1
            for x, y in _bbox_lattice(p, args.grid):
                try:
                    basis = grad_fn(p, [[x, y]])
                except (OutsidePolygon, PointTooCloseToBoundary):
                    continue
                lam = basis.values[0, apex_i]
                gx, gy = basis.gradients[0, apex_i]
                surface.append(f"{a:g},{kind},{x:.6g},{y:.6g},{lam:.6g},{gx:.6g},{gy:.6g}")
    _emit("\n".join(rows) + "\n", args.out)
    if surface is not None:
        with open(args.surface, "w", encoding="utf-8") as fh:
            fh.write("\n".join(surface) + "\n")
    return 0


def cmd_converge(args: argparse.Namespace) -> int:
    """Poisson convergence table for the manufactured solution."""
    levels = [int(s) for s in args.levels.split(",")]
    if any(n < 1 or n > 128 for n in levels):
        raise ValueError("levels must lie in 1..128")
    if any(b <= a for a, b in zip(levels, levels[1:])):
        raise ValueError("levels must be strictly increasing")
    report = convergence_study(levels)
    if args.format == "csv":
        text = report.to_csv()
    elif args.format == "md":
        text = report.to_markdown()
    else:
        text = report.to_json() + "\n"
    _emit(text, args.out)
    return 0


def cmd_properties(args: argparse.Namespace) -> int:
    """Randomized invariant audit; exit code 0 only with zero violations."""
    if args.polygons < 1 or args.samples < 1:
        raise ValueError("--polygons and --samples must be at least 1")
    if args.seed < 0:
        raise ValueError("--seed must be non-negative")
    report = run_property_audit(args.polygons, args.samples, args.seed)
    _emit(report.to_text(), args.out)
    return 0 if report.total_violations == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="mvcoords",
        description="Barycentric coordinate tools: evaluation dumps, polygon "
        "quality checks, gradient studies, a Poisson convergence table, and "
        "a property audit.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    ev = sub.add_parser("eval", help="dump coordinate values and gradients at points")
    ev.add_argument("--polygon", required=True, help="polygon JSON file")
    ev.add_argument("--point", action="append", default=[], metavar="X,Y",
                    help="evaluation point, repeatable")
    ev.add_argument("--grid", type=int, default=0, metavar="N",
                    help="add an N-by-N bounding-box lattice of points")
    ev.add_argument("--kind", choices=("mvc", "wachspress"), default="mvc")
    ev.add_argument("--out", help="output file (default stdout)")
    ev.set_defaults(func=cmd_eval)

    cp = sub.add_parser("check-polygon", help="quality constants and threshold checks")
    cp.add_argument("--polygon", required=True, help="polygon JSON file")
    cp.add_argument("--gamma-star", type=float, default=6.0,
                    help="largest acceptable aspect ratio (default 6)")
    cp.add_argument("--d-star", type=float, default=0.1,
                    help="smallest acceptable edge length at unit diameter (default 0.1)")
    cp.add_argument("--out", help="output file (default stdout)")
    cp.set_defaults(func=cmd_check_polygon)

    ps = sub.add_parser("pentagon-study", help="sup-gradient sweep over apex heights")
    ps.add_argument("--apex", default="1.5,1.05", metavar="H1,H2,...",
                    help="comma-separated apex heights, each > 1")
    ps.add_argument("--grid", type=int, default=64, help="scan resolution (default 64)")
    ps.add_argument("--margin", type=float, default=None,
                    help="boundary standoff (default 1e-4 of the diameter)")
    ps.add_argument("--surface", metavar="PATH",
                    help="also dump the apex basis surface to this CSV")
    ps.add_argument("--out", help="output file (default stdout)")
    ps.set_defaults(func=cmd_pentagon_study)

    cv = sub.add_parser("converge", help="Poisson convergence study table")
    cv.add_argument("--levels", default="2,4,8,16,32,64", metavar="N1,N2,...",
                    help="mesh sizes, strictly increasing, within 1..128")
    cv.add_argument("--format", choices=("csv", "md", "json"), default="csv")
    cv.add_argument("--out", help="output file (default stdout)")
    cv.set_defaults(func=cmd_converge)

    pr = sub.add_parser("properties", help="randomized invariant audit")
    pr.add_argument("--seed", type=int, default=42)
    pr.add_argument("--polygons", type=int, default=100, metavar="COUNT")
    pr.add_argument("--samples", type=int, default=10_000, metavar="COUNT",
                    help="interior sample points per polygon")
    pr.add_argument("--out", help="output file (default stdout)")
    pr.set_defaults(func=cmd_properties)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except NoConvergence as exc:
        print(f"error: NoConvergence: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
