"""Mean value and Wachspress barycentric coordinates on convex polygons.

Both families are evaluated in batch over (m, 2) point arrays. Values are
defined on the closed polygon (boundary points take the edge-limit path,
which is linear along each edge); analytic gradients are defined only at
strictly interior points.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    CollinearVertices,
    EvaluationError,
    OutsidePolygon,
    PointTooCloseToBoundary,
    StepTooLarge,
)
from .geometry import Polygon, PointGeometry, _rot_ccw, point_geometry_batch

_COLLINEAR_TOL = 1e-9


@dataclass
class BasisEval:
    """Basis values (m, n) and, when requested, gradients (m, n, 2)."""

    values: np.ndarray
    gradients: np.ndarray | None = None


def _as_points(points) -> tuple[np.ndarray, bool]:
    x = np.asarray(points, dtype=float)
    single = x.ndim == 1
    X = np.atleast_2d(x)
    if X.ndim != 2 or X.shape[1] != 2:
        raise ValueError("points must be a (2,) or (m, 2) array")
    return X, single


def _classify(p: Polygon, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Split points into interior / boundary-band rows; raise on outside."""
    sd = p.signed_boundary_distance(X)
    eps = p.eps_interior
    outside = np.flatnonzero(sd < -eps)
    if outside.size:
        raise OutsidePolygon(f"point index {int(outside[0])} lies outside the polygon")
    interior = sd > eps
    return interior, ~interior


def _edge_limit_values(p: Polygon, X: np.ndarray) -> np.ndarray:
    """Boundary values: linear along the nearest edge, delta at vertices."""
    m = X.shape[0]
    lam = np.zeros((m, p.n))
    if m == 0:
        return lam
    k = np.argmin(p.edge_distances(X), axis=1)
    v = p.vertices[k]
    e = p.edge_vectors[k]
    s = np.clip(np.sum((X - v) * e, axis=1) / np.sum(e * e, axis=1), 0.0, 1.0)
    rows = np.arange(m)
    lam[rows, k] = 1.0 - s
    lam[rows, (k + 1) % p.n] += s
    return lam


def _require_finite(arr: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(arr)):
        raise EvaluationError(f"non-finite {what}; point too close to the boundary?")


def _mvc_interior(p: Polygon, X: np.ndarray, gradients: bool) -> BasisEval:
    g = point_geometry_batch(p, X, gradients=gradients)
    t_prev = np.roll(g.t, 1, axis=1)
    w = (t_prev + g.t) / g.r
    total = np.sum(w, axis=1, keepdims=True)
    lam = w / total
    if not gradients:
        return BasisEval(values=lam)
    gt_prev = np.roll(g.grad_t, 1, axis=1)
    gw = (gt_prev + g.grad_t) / g.r[:, :, None] - (w / g.r)[:, :, None] * g.grad_r
    gtotal = np.sum(gw, axis=1, keepdims=True)
    glam = (gw - lam[:, :, None] * gtotal) / total[:, :, None]
    return BasisEval(values=lam, gradients=glam)


def _wachspress_interior(p: Polygon, X: np.ndarray, gradients: bool) -> BasisEval:
    g = point_geometry_batch(p, X, gradients=False)
    area = 0.5 * g.cross  # signed area of triangle (x, v_i, v_{i+1}); positive inside
    area_prev = np.roll(area, 1, axis=1)
    e = p.edge_vectors
    corner = 0.5 * (np.roll(e, 1, axis=0)[:, 0] * e[:, 1] - np.roll(e, 1, axis=0)[:, 1] * e[:, 0])
    w = corner[None, :] / (area_prev * area)
    total = np.sum(w, axis=1, keepdims=True)
    lam = w / total
    if not gradients:
        return BasisEval(values=lam)
    # grad A_i is constant: half the CCW normal of edge i
    ga = 0.5 * _rot_ccw(e)
    ga_prev = np.roll(ga, 1, axis=0)
    ratio = ga[None, :, :] / area[:, :, None] + ga_prev[None, :, :] / area_prev[:, :, None]
    gw = -w[:, :, None] * ratio
    gtotal = np.sum(gw, axis=1, keepdims=True)
    glam = (gw - lam[:, :, None] * gtotal) / total[:, :, None]
    return BasisEval(values=lam, gradients=glam)


def _require_strictly_convex(p: Polygon) -> None:
    gap = np.pi - p.interior_angles
    if np.any(gap < _COLLINEAR_TOL):
        k = int(np.argmin(gap))
        raise CollinearVertices(
            f"interior angle at vertex {k} is within {_COLLINEAR_TOL:g} of pi"
        )


def mvc_weights(pg: PointGeometry) -> np.ndarray:
    """Unnormalized mean value weights (t_{i-1} + t_i) / r_i from a
    point's geometry record. Interiority was already enforced when the
    record was built. The sum is at least 2*pi on polygons of diameter
    <= 1, which is what keeps the normalization stable."""
    w = (np.roll(pg.t, 1) + pg.t) / pg.r
    _require_finite(w, "mean value weights")
    return w


def _values(p: Polygon, points, kind: str) -> np.ndarray:
    X, single = _as_points(points)
    interior, boundary = _classify(p, X)
    lam = np.empty((X.shape[0], p.n))
    if np.any(interior):
        fn = _mvc_interior if kind == "mvc" else _wachspress_interior
        lam[interior] = fn(p, X[interior], gradients=False).values
    if np.any(boundary):
        lam[boundary] = _edge_limit_values(p, X[boundary])
    _require_finite(lam, f"{kind} values")
    return lam[0] if single else lam


def _gradients(p: Polygon, points, kind: str) -> BasisEval:
    X, single = _as_points(points)
    sd = p.signed_boundary_distance(X)
    outside = np.flatnonzero(sd < -p.eps_interior)
    if outside.size:
        raise OutsidePolygon(f"point index {int(outside[0])} lies outside the polygon")
    bad = np.flatnonzero(sd <= p.eps_interior)
    if bad.size:
        raise PointTooCloseToBoundary(
            f"gradients need strictly interior points; index {int(bad[0])} is not"
        )
    fn = _mvc_interior if kind == "mvc" else _wachspress_interior
    out = fn(p, X, gradients=True)
    _require_finite(out.values, f"{kind} values")
    _require_finite(out.gradients, f"{kind} gradients")
    if single:
        return BasisEval(values=out.values[0], gradients=out.gradients[0])
    return out


def mvc_values(p: Polygon, points) -> np.ndarray:
    """Mean value coordinates at one (2,) or many (m, 2) points.

    Boundary points (within the interior tolerance) get the edge-limit
    values; points outside the polygon raise OutsidePolygon.
    """
    return _values(p, points, "mvc")


def mvc_gradients(p: Polygon, points) -> BasisEval:
    """Mean value coordinate values and analytic gradients at strictly
    interior points."""
    return _gradients(p, points, "mvc")


def wachspress_values(p: Polygon, points) -> np.ndarray:
    """Wachspress coordinates; requires every interior angle < pi."""
    _require_strictly_convex(p)
    return _values(p, points, "wachspress")


def wachspress_gradients(p: Polygon, points) -> BasisEval:
    """Wachspress values and analytic gradients at strictly interior
    points; requires every interior angle < pi."""
    _require_strictly_convex(p)
    return _gradients(p, points, "wachspress")


def fd_gradient(p: Polygon, points, kind: str = "mvc", step: float | None = None) -> np.ndarray:
    """Central finite-difference gradients of the coordinate values.

    ``step`` defaults to 1e-6 times the diameter. Every stencil point must
    stay strictly interior, so points closer to the boundary than
    step + interior tolerance raise StepTooLarge.
    """
    if kind == "wachspress":
        _require_strictly_convex(p)
    elif kind != "mvc":
        raise ValueError(f"unknown coordinate kind {kind!r}")
    X, single = _as_points(points)
    h = 1e-6 * p.diameter if step is None else float(step)
    if h <= 0.0:
        raise StepTooLarge("step must be positive")
    sd = p.signed_boundary_distance(X)
    outside = np.flatnonzero(sd < -p.eps_interior)
    if outside.size:
        raise OutsidePolygon(f"point index {int(outside[0])} lies outside the polygon")
    bad = np.flatnonzero(sd <= h + p.eps_interior)
    if bad.size:
        raise StepTooLarge(
            f"stencil of half-width {h:g} leaves the interior at point index {int(bad[0])}"
        )
    m = X.shape[0]
    shifts = np.array([[h, 0.0], [-h, 0.0], [0.0, h], [0.0, -h]])
    stencil = (X[:, None, :] + shifts[None, :, :]).reshape(m * 4, 2)
    fn = _mvc_interior if kind == "mvc" else _wachspress_interior
    vals = fn(p, stencil, gradients=False).values.reshape(m, 4, p.n)
    grad = np.stack([vals[:, 0] - vals[:, 1], vals[:, 2] - vals[:, 3]], axis=2) / (2.0 * h)
    return grad[0] if single else grad


@dataclass
class ScanResult:
    """Outcome of a gradient sup scan over an interior grid."""

    kind: str
    resolution: int
    margin: float
    n_points: int
    per_vertex_max: np.ndarray
    argmax_points: np.ndarray
    overall_max: float
    overall_vertex: int

    def to_csv(self) -> str:
        lines = ["vertex_index,max_grad_norm"]
        for i, g in enumerate(self.per_vertex_max):
            lines.append(f"{i},{g:.9e}")
        return "\n".join(lines) + "\n"


def _scan_grid(p: Polygon, resolution: int, margin: float) -> np.ndarray:
    """Axis-aligned scan points covering {x : dist(x, boundary) >= margin}.

    A uniform lattice misses the thin boundary strips where steep
    gradients live (strip thickness can be far below the lattice spacing),
    so the grid is built per scanline instead: for each of ``resolution``
    rows the admissible segment is found by bisection on the boundary
    distance and filled with ``resolution`` points, and the same is done
    per column. End points land on the margin shell, where the supremum
    of an unbounded family concentrates.
    """
    x0, y0, x1, y1 = p.bbox
    pad = 1.0 - 1e-9  # keep shell points on the admissible side of the cut

    def scanlines(fixed_vals, axis):
        rows = []
        lo_all, hi_all = (y0, y1) if axis == 0 else (x0, x1)
        for c in fixed_vals:
            def make(tt):
                pt = np.empty((np.size(tt), 2))
                pt[:, axis] = c
                pt[:, 1 - axis] = tt
                return pt

            tt = np.linspace(lo_all, hi_all, 4 * resolution)
            ok = p.signed_boundary_distance(make(tt)) >= margin
            if not np.any(ok):
                continue
            lo, hi = tt[np.argmax(ok)], tt[len(ok) - 1 - np.argmax(ok[::-1])]
            # push each end outward to the margin shell by bisection
            lo_out, hi_out = lo - (tt[1] - tt[0]), hi + (tt[1] - tt[0])
            for _ in range(60):
                mid = 0.5 * (lo + lo_out)
                if p.signed_boundary_distance(make(np.array([mid]))[0]) >= margin / pad:
                    lo = mid
                else:
                    lo_out = mid
                mid = 0.5 * (hi + hi_out)
                if p.signed_boundary_distance(make(np.array([mid]))[0]) >= margin / pad:
                    hi = mid
                else:
                    hi_out = mid
            rows.append(make(np.linspace(lo, hi, resolution)))
        return rows

    xs = np.linspace(x0 + margin, x1 - margin, resolution)
    ys = np.linspace(y0 + margin, y1 - margin, resolution)
    parts = scanlines(xs, 0) + scanlines(ys, 1)
    if not parts:
        raise EvaluationError("no scan points survive the margin; lower it or refine")
    pts = np.concatenate(parts, axis=0)
    return pts[p.signed_boundary_distance(pts) >= margin * pad]


def sup_gradient_scan(
    p: Polygon,
    kind: str = "mvc",
    resolution: int = 64,
    margin: float | None = None,
) -> ScanResult:
    """Largest gradient norm of each basis function over interior scan
    points at least ``margin`` away from the boundary.

    The margin defaults to 1e-4 times the diameter. The reported maxima
    estimate the supremum over the whole margin-inset region, so for
    coordinate families whose gradients blow up near a flattening vertex
    the result grows like 1/margin while well-behaved families stay
    bounded as the margin shrinks.
    """
    if resolution < 8:
        raise ValueError("resolution must be at least 8")
    margin = 1e-4 * p.diameter if margin is None else float(margin)
    if margin <= p.eps_interior:
        raise ValueError("margin must exceed the interior tolerance")
    pts = _scan_grid(p, resolution, margin)
    if kind == "wachspress":
        _require_strictly_convex(p)
        out = _wachspress_interior(p, pts, gradients=True)
    elif kind == "mvc":
        out = _mvc_interior(p, pts, gradients=True)
    else:
        raise ValueError(f"unknown coordinate kind {kind!r}")
    _require_finite(out.gradients, f"{kind} gradients")
    norms = np.hypot(out.gradients[:, :, 0], out.gradients[:, :, 1])
    rows = np.argmax(norms, axis=0)
    per_vertex = norms[rows, np.arange(p.n)]
    k = int(np.argmax(per_vertex))
    return ScanResult(
        kind=kind,
        resolution=resolution,
        margin=margin,
        n_points=int(pts.shape[0]),
        per_vertex_max=per_vertex,
        argmax_points=pts[rows],
        overall_max=float(per_vertex[k]),
        overall_vertex=k,
    )
