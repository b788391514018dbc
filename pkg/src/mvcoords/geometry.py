"""Convex polygon geometry.

Validation, quality metrics (diameter, inradius, angle extremes, the
separation radius ``h_star`` and angle threshold ``alpha_star``), and the
per-point distance/angle data that the barycentric coordinate formulas
are built from.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.optimize import linprog
from scipy.spatial.distance import pdist

from .errors import DegenerateEdge, NonConvex, PointTooCloseToBoundary, WrongOrientation

# Relative tolerances: geometry predicates scale them by the polygon size.
EPS_GEOM = 1e-12
EPS_EVAL = 1e-9


def _rot_cw(u: np.ndarray) -> np.ndarray:
    """Rotate 2D vectors (last axis) by -90 degrees."""
    return np.stack([u[..., 1], -u[..., 0]], axis=-1)


def _rot_ccw(u: np.ndarray) -> np.ndarray:
    """Rotate 2D vectors (last axis) by +90 degrees."""
    return np.stack([-u[..., 1], u[..., 0]], axis=-1)


class Polygon:
    """Immutable convex polygon given by a counterclockwise vertex loop.

    Vertices are stored as an (n, 2) float array. Edge ``k`` joins vertex
    ``k`` to vertex ``(k + 1) % n``; all indices in this package are
    0-based. Interior angles equal to pi are accepted, so a square with
    mid-side nodes validates (the Wachspress evaluator rejects such
    polygons separately).
    """

    def __init__(self, vertices) -> None:
        v = np.asarray(vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or v.shape[0] < 3:
            raise ValueError("need an (n, 2) array of at least 3 vertices")
        if not np.all(np.isfinite(v)):
            raise ValueError("vertices must be finite")

        scale = float(np.max(pdist(v)))
        if scale <= 0.0:
            raise DegenerateEdge("all vertices coincide")

        edges = np.roll(v, -1, axis=0) - v
        lengths = np.hypot(edges[:, 0], edges[:, 1])
        if np.min(lengths) <= EPS_GEOM * scale:
            raise DegenerateEdge(
                f"edge {int(np.argmin(lengths))} shorter than {EPS_GEOM:g} * diameter"
            )

        area2 = float(np.sum(v[:, 0] * np.roll(v[:, 1], -1) - np.roll(v[:, 0], -1) * v[:, 1]))
        if area2 < 0.0:
            warnings.warn("clockwise vertex loop reversed", WrongOrientation, stacklevel=2)
            v = v[::-1].copy()
            edges = np.roll(v, -1, axis=0) - v
            lengths = np.hypot(edges[:, 0], edges[:, 1])
            area2 = -area2
        if area2 <= EPS_GEOM * scale * scale:
            raise NonConvex("polygon has (numerically) zero area")

        # Convexity test on the sine of each turn angle, so the tolerance is
        # dimensionless. Zero turns (interior angle pi) are allowed.
        cross = edges[:, 0] * np.roll(edges[:, 1], -1) - edges[:, 1] * np.roll(edges[:, 0], -1)
        sine = cross / (lengths * np.roll(lengths, -1))
        if np.min(sine) < -EPS_GEOM:
            raise NonConvex(f"reflex turn at vertex {int((np.argmin(sine) + 1) % len(v))}")

        v.setflags(write=False)
        self._vertices = v

    @property
    def vertices(self) -> np.ndarray:
        return self._vertices

    @cached_property
    def n(self) -> int:
        return self._vertices.shape[0]

    @cached_property
    def edge_vectors(self) -> np.ndarray:
        """(n, 2) array; row k is vertex[k+1] - vertex[k], cyclically."""
        return np.roll(self._vertices, -1, axis=0) - self._vertices

    @cached_property
    def edge_lengths(self) -> np.ndarray:
        e = self.edge_vectors
        return np.hypot(e[:, 0], e[:, 1])

    @cached_property
    def diameter(self) -> float:
        """Largest distance between two polygon points (attained at vertices)."""
        return float(np.max(pdist(self._vertices)))

    @cached_property
    def area(self) -> float:
        v = self._vertices
        return 0.5 * float(np.sum(v[:, 0] * np.roll(v[:, 1], -1) - np.roll(v[:, 0], -1) * v[:, 1]))

    @cached_property
    def centroid(self) -> np.ndarray:
        """Vertex centroid (mean of vertices); interior for convex polygons."""
        return self._vertices.mean(axis=0)

    @cached_property
    def interior_angles(self) -> np.ndarray:
        """Interior angle at each vertex, in (0, pi].

        Uses atan2 of cross/dot so angles at exactly pi are well conditioned;
        tiny negative crosses from roundoff are clamped to zero.
        """
        v = self._vertices
        a = np.roll(v, 1, axis=0) - v
        b = np.roll(v, -1, axis=0) - v
        cross = np.maximum(b[:, 0] * a[:, 1] - b[:, 1] * a[:, 0], 0.0)
        dot = np.sum(a * b, axis=1)
        return np.arctan2(cross, dot)

    @cached_property
    def inradius(self) -> float:
        """Radius of the largest inscribed circle (Chebyshev radius).

        Solved as the small linear program ``maximize r`` subject to the
        circle center staying at least ``r`` inside every edge line.
        """
        return _chebyshev_radius(self)

    @cached_property
    def bbox(self) -> tuple[float, float, float, float]:
        v = self._vertices
        return (float(v[:, 0].min()), float(v[:, 1].min()),
                float(v[:, 0].max()), float(v[:, 1].max()))

    @cached_property
    def eps_interior(self) -> float:
        """Absolute margin below which a point counts as on the boundary."""
        return EPS_EVAL * self.diameter

    def signed_boundary_distance(self, points) -> np.ndarray | float:
        """Signed distance to the boundary: positive inside, negative outside.

        Computed as the minimum signed distance to the edge lines, which for
        interior points of a convex polygon never exceeds the true boundary
        distance (so it is a safe interiority margin).
        """
        x = np.asarray(points, dtype=float)
        single = x.ndim == 1
        X = np.atleast_2d(x)
        v = self._vertices
        e = self.edge_vectors
        d = X[:, None, :] - v[None, :, :]
        cross = e[None, :, 0] * d[:, :, 1] - e[None, :, 1] * d[:, :, 0]
        sd = np.min(cross / self.edge_lengths[None, :], axis=1)
        return float(sd[0]) if single else sd

    def edge_distances(self, points) -> np.ndarray:
        """Euclidean distance from each point to each closed edge segment.

        Returns an (m, n) array for (m, 2) input points.
        """
        X = np.atleast_2d(np.asarray(points, dtype=float))
        v = self._vertices
        e = self.edge_vectors
        d = X[:, None, :] - v[None, :, :]
        tt = np.clip(np.sum(d * e[None, :, :], axis=2) / np.sum(e * e, axis=1)[None, :], 0.0, 1.0)
        foot = v[None, :, :] + tt[:, :, None] * e[None, :, :]
        return np.hypot(X[:, None, 0] - foot[:, :, 0], X[:, None, 1] - foot[:, :, 1])

    def contains(self, point, tol: float | None = None) -> bool:
        tol = self.eps_interior if tol is None else tol
        return bool(self.signed_boundary_distance(point) >= -tol)

    def __repr__(self) -> str:
        return f"Polygon(n={self.n}, diameter={self.diameter:.6g})"


def polygon_validate(vertices) -> Polygon:
    """Validate a vertex loop and return the corresponding Polygon."""
    return Polygon(vertices)


def polygon_to_json(p: Polygon) -> str:
    return json.dumps({"vertices": p.vertices.tolist()})


def polygon_from_json(text: str) -> Polygon:
    """Read a polygon from its JSON form ``{"vertices": [[x, y], ...]}``.

    Both orientations are accepted; clockwise input is reversed with a
    warning.
    """
    data = json.loads(text)
    return Polygon(data["vertices"])


def load_polygon(path) -> Polygon:
    with open(path, "r", encoding="utf-8") as fh:
        return polygon_from_json(fh.read())


def save_polygon(p: Polygon, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(polygon_to_json(p))


def _chebyshev_radius(p: Polygon) -> float:
    v = p.vertices
    e = p.edge_vectors / p.edge_lengths[:, None]
    inward = np.stack([-e[:, 1], e[:, 0]], axis=1)
    # maximize r  s.t.  inward_k . (c - v_k) >= r   (variables c_x, c_y, r)
    a_ub = np.column_stack([-inward, np.ones(p.n)])
    b_ub = -np.sum(inward * v, axis=1)
    x0, y0, x1, y1 = p.bbox
    res = linprog(
        c=[0.0, 0.0, -1.0],
        A_ub=a_ub,
        b_ub=b_ub,
        bounds=[(x0, x1), (y0, y1), (0.0, None)],
        method="highs",
    )
    if not res.success:
        raise RuntimeError(f"inscribed circle LP failed: {res.message}")
    return float(res.x[2])


def min_vertex_distance(p: Polygon) -> float:
    """Smallest distance between any two vertices (not only edge ends)."""
    return float(np.min(pdist(p.vertices)))


@dataclass(frozen=True)
class GeometricConstants:
    """Quality constants of a polygon, reported in its own length units."""

    diameter: float
    inradius: float
    aspect_ratio: float
    min_edge: float
    beta_min: float
    beta_max: float
    h_star: float
    alpha_star: float


def geometric_constants(p: Polygon) -> GeometricConstants:
    """Compute all quality constants for the polygon as given.

    Callers who want diameter-one constants normalize first with
    :func:`normalize_to_unit_diameter`.
    """
    beta = p.interior_angles
    h_star = compute_hstar(p)
    alpha_star = max(np.pi - float(beta.min()) / 2.0, 2.0 * np.arctan(1.0 / h_star))
    return GeometricConstants(
        diameter=p.diameter,
        inradius=p.inradius,
        aspect_ratio=p.diameter / p.inradius,
        min_edge=float(p.edge_lengths.min()),
        beta_min=float(beta.min()),
        beta_max=float(beta.max()),
        h_star=h_star,
        alpha_star=float(alpha_star),
    )


def _segment_segment_distance(a0, a1, b0, b1) -> float:
    """Distance between two non-crossing closed segments."""
    def point_seg(q, s0, s1):
        d = s1 - s0
        tt = np.clip(np.dot(q - s0, d) / np.dot(d, d), 0.0, 1.0)
        return float(np.hypot(*(q - (s0 + tt * d))))

    return min(
        point_seg(a0, b0, b1), point_seg(a1, b0, b1),
        point_seg(b0, a0, a1), point_seg(b1, a0, a1),
    )


def compute_hstar(p: Polygon) -> float:
    """Largest verified radius h such that no ball B(x, h) centered in the
    polygon meets two non-adjacent edges or three edges.

    For n >= 4 this is half the minimum distance over non-adjacent closed
    edge pairs (any three edges of such a polygon contain a non-adjacent
    pair, so the pair bound also enforces the three-edge clause). Edges are
    adjacent when they share a vertex, so the two halves of a subdivided
    side count as adjacent.

    For triangles every edge pair is adjacent and only the three-edge
    clause binds; the minimum over the interior of the largest edge
    distance is estimated on a 512x512 grid with one local refinement
    pass.
    """
    v = p.vertices
    n = p.n
    if n >= 4:
        best = np.inf
        for i in range(n):
            for j in range(i + 1, n):
                if j - i == 1 or j - i == n - 1:  # cyclic neighbors share a vertex
                    continue
                d = _segment_segment_distance(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n])
                best = min(best, d)
        return 0.5 * best

    def min_max_edge_distance(xs, ys):
        gx, gy = np.meshgrid(xs, ys)
        pts = np.column_stack([gx.ravel(), gy.ravel()])
        inside = p.signed_boundary_distance(pts) > 0.0
        pts = pts[inside]
        if pts.shape[0] == 0:
            return np.inf, None
        f = p.edge_distances(pts).max(axis=1)
        k = int(np.argmin(f))
        return float(f[k]), pts[k]

    x0, y0, x1, y1 = p.bbox
    coarse, at = min_max_edge_distance(np.linspace(x0, x1, 512), np.linspace(y0, y1, 512))
    hx = 2.0 * (x1 - x0) / 511.0
    hy = 2.0 * (y1 - y0) / 511.0
    fine, _ = min_max_edge_distance(
        np.linspace(at[0] - hx, at[0] + hx, 64), np.linspace(at[1] - hy, at[1] + hy, 64)
    )
    return min(coarse, fine)


def ball_edge_intersections(p: Polygon, x, h: float) -> np.ndarray:
    """Indices of closed edges the closed ball B(x, h) touches.

    Closed-ball semantics (distance <= h) make the separation radius a
    supremum of safe radii rather than a safe radius itself: at exactly
    h = compute_hstar(p) the ball centered on the right boundary point
    touches a third edge.
    """
    if h <= 0.0:
        raise ValueError("h must be positive")
    d = p.edge_distances(np.asarray(x, dtype=float))[0]
    return np.flatnonzero(d <= h)


@dataclass(frozen=True)
class SimilarityTransform:
    """Uniform scaling plus translation: x -> scale * x + translation."""

    scale: float
    translation: np.ndarray

    def apply(self, points) -> np.ndarray:
        return self.scale * np.asarray(points, dtype=float) + self.translation

    def invert(self, points) -> np.ndarray:
        return (np.asarray(points, dtype=float) - self.translation) / self.scale

    @property
    def is_identity(self) -> bool:
        return self.scale == 1.0 and not np.any(self.translation)


def normalize_to_unit_diameter(p: Polygon) -> tuple[Polygon, SimilarityTransform]:
    """Rescale the polygon to diameter one; returns (polygon, transform)."""
    d = p.diameter
    if abs(d - 1.0) <= 1e-14:
        return p, SimilarityTransform(1.0, np.zeros(2))
    t = SimilarityTransform(1.0 / d, np.zeros(2))
    return Polygon(t.apply(p.vertices)), t


def apex_pentagon(height: float) -> Polygon:
    """The square [-1, 1]^2 with a fifth vertex at (0, height) over the top
    edge. As height drops toward 1 the apex angle flattens toward pi and the
    two short edges shrink, which is what makes the family a stress test for
    coordinate gradients.
    """
    if height <= 1.0:
        raise ValueError("apex height must exceed 1")
    return Polygon([(-1.0, 1.0), (-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (0.0, height)])


@dataclass
class PointGeometryArrays:
    """Vectorized per-point geometry for a batch of evaluation points.

    All arrays have shape (m, n) or (m, n, 2) for m points and n vertices.
    ``cross`` and ``dot`` are of the vertex-to-point vector pairs
    (v_i - x, v_{i+1} - x); twice the signed triangle area A(x, v_i, v_{i+1})
    is ``cross``. Gradient arrays are None unless requested.
    """

    r: np.ndarray
    cross: np.ndarray
    dot: np.ndarray
    alpha: np.ndarray
    t: np.ndarray
    grad_r: np.ndarray | None = None
    grad_alpha: np.ndarray | None = None
    grad_t: np.ndarray | None = None


def point_geometry_batch(p: Polygon, points, gradients: bool = False) -> PointGeometryArrays:
    """Distances r_i, subtended angles alpha_i, half-angle tangents t_i
    (and optionally their gradients) at each point of an (m, 2) batch.

    Pure array computation with no interiority checks; callers gate the
    points. Angles come from atan2 of cross/dot, and tangents use
    cross / (r_i r_{i+1} + dot) or its reciprocal-cancellation-free
    counterpart, so both stay accurate near alpha = 0 and alpha = pi.
    """
    v = p.vertices
    X = np.atleast_2d(np.asarray(points, dtype=float))
    d = X[:, None, :] - v[None, :, :]
    d_next = np.roll(d, -1, axis=1)
    r = np.hypot(d[:, :, 0], d[:, :, 1])
    r_next = np.roll(r, -1, axis=1)
    # cross/dot of (v_i - x, v_{i+1} - x); equals cross/dot of (d_i, d_next_i)
    cross = d[:, :, 0] * d_next[:, :, 1] - d[:, :, 1] * d_next[:, :, 0]
    dot = np.sum(d * d_next, axis=2)
    alpha = np.arctan2(cross, dot)
    rr = r * r_next
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(dot >= 0.0, cross / (rr + dot), (rr - dot) / cross)

    out = PointGeometryArrays(r=r, cross=cross, dot=dot, alpha=alpha, t=t)
    if gradients:
        with np.errstate(divide="ignore", invalid="ignore"):
            out.grad_r = d / r[:, :, None]
            out.grad_alpha = (
                _rot_cw(d) / (r * r)[:, :, None]
                + _rot_ccw(d_next) / (r_next * r_next)[:, :, None]
            )
            # grad t = grad alpha / (2 cos^2(alpha/2)) and
            # 2 cos^2(alpha/2) = 1 + cos alpha = (r_i r_{i+1} + dot) / (r_i r_{i+1})
            out.grad_t = out.grad_alpha * (rr / (rr + dot))[:, :, None]
    return out


@dataclass
class PointGeometry:
    """Per-point geometry at a single strictly interior evaluation point."""

    point: np.ndarray
    r: np.ndarray
    alpha: np.ndarray
    t: np.ndarray
    grad_r: np.ndarray | None = None
    grad_alpha: np.ndarray | None = None
    grad_t: np.ndarray | None = None


def point_geometry(p: Polygon, x, gradients: bool = False) -> PointGeometry:
    """Geometry data at one strictly interior point.

    Raises PointTooCloseToBoundary when the point is within the interior
    tolerance of the boundary (or outside); callers should switch to the
    edge-limit evaluation path in that case.
    """
    x = np.asarray(x, dtype=float)
    if p.signed_boundary_distance(x) <= p.eps_interior:
        raise PointTooCloseToBoundary(
            f"point {x.tolist()} is within {p.eps_interior:g} of the boundary"
        )
    g = point_geometry_batch(p, x[None, :], gradients=gradients)
    return PointGeometry(
        point=x,
        r=g.r[0],
        alpha=g.alpha[0],
        t=g.t[0],
        grad_r=None if g.grad_r is None else g.grad_r[0],
        grad_alpha=None if g.grad_alpha is None else g.grad_alpha[0],
        grad_t=None if g.grad_t is None else g.grad_t[0],
    )
