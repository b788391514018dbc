"""Randomized property audits.

Generates quality-controlled convex polygons, samples interior points,
and counts violations of the geometric and barycentric properties the
rest of the package relies on. Everything is deterministic for a fixed
seed, so audit reports can be compared byte for byte.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import ConvexHull

from .coords import (
    fd_gradient,
    mvc_gradients,
    mvc_values,
    wachspress_gradients,
    wachspress_values,
)
from .errors import PolygonError
from .geometry import (
    GeometricConstants,
    Polygon,
    geometric_constants,
    min_vertex_distance,
    normalize_to_unit_diameter,
    point_geometry_batch,
)

GAMMA_MAX = 6.0
D_STAR = 0.1


def random_convex_polygon(
    rng: np.random.Generator,
    n_vertices: int | None = None,
    gamma_max: float = GAMMA_MAX,
    d_star: float = D_STAR,
    max_tries: int = 2000,
) -> Polygon:
    """Random unit-diameter convex polygon with 5..10 vertices meeting the
    aspect-ratio bound (gamma < gamma_max) and the pairwise vertex
    separation bound (> d_star).

    Vertices are drawn on a random-radius star around the origin and
    passed through a convex hull; draws failing the vertex-count or
    quality gates are rejected and retried.
    """
    for _ in range(max_tries):
        target = int(rng.integers(5, 11)) if n_vertices is None else n_vertices
        ang = np.sort(rng.uniform(0.0, 2.0 * np.pi, target))
        rad = rng.uniform(0.4, 1.0, target)
        pts = np.column_stack([rad * np.cos(ang), rad * np.sin(ang)])
        hull = ConvexHull(pts)
        if len(hull.vertices) != target:
            continue
        try:
            poly = Polygon(pts[hull.vertices])
        except PolygonError:
            continue
        poly, _ = normalize_to_unit_diameter(poly)
        if poly.diameter / poly.inradius >= gamma_max:
            continue
        if min_vertex_distance(poly) <= d_star:
            continue
        # keep corners honestly convex so Wachspress stays well defined
        if poly.interior_angles.max() > np.pi - 1e-6:
            continue
        return poly
    raise RuntimeError(f"no acceptable polygon in {max_tries} draws")


def sample_interior(
    p: Polygon,
    rng: np.random.Generator,
    count: int,
    margin: float | None = None,
) -> np.ndarray:
    """Uniform interior samples at least ``margin`` from the boundary
    (default: the strict-interior tolerance), by bbox rejection."""
    margin = p.eps_interior if margin is None else float(margin)
    x0, y0, x1, y1 = p.bbox
    out = np.empty((count, 2))
    have = 0
    while have < count:
        cand = rng.uniform((x0, y0), (x1, y1), size=(2 * (count - have) + 16, 2))
        keep = cand[p.signed_boundary_distance(cand) > margin]
        take = min(count - have, keep.shape[0])
        out[have:have + take] = keep[:take]
        have += take
    return out


@dataclass(frozen=True)
class AuditTolerances:
    """Slacks for the audited inequalities; zero-violation defaults."""

    angle_sum: float = 1e-12          # |Σα - 2π|
    weight_sum_slack: float = 1e-9    # Σw ≥ 2π - slack on unit diameter
    grad_alpha_slack: float = 1e-9    # |∇α| ≤ 1/r_i + 1/r_{i+1} (relative)
    partition: float = 1e-12          # |Σλ - 1|
    linear_precision: float = 1e-12   # |Σλv - x| per unit diameter
    nonnegative: float = -1e-12       # λ ≥ this
    grad_sum: float = 1e-9            # |Σ∇λ| and |Σv⊗∇λ - I|
    fd_match: float = 1e-6            # analytic vs central differences


@dataclass
class CheckCounter:
    name: str
    checked: int = 0
    violations: int = 0
    worst: float = 0.0

    def add(self, n_checked: int, bad: int, worst: float) -> None:
        self.checked += int(n_checked)
        self.violations += int(bad)
        if worst > self.worst:
            self.worst = float(worst)


@dataclass
class PropertyAuditReport:
    """Violation counts per audited property."""

    seed: int
    n_polygons: int
    samples_per_polygon: int
    checks: list[CheckCounter] = field(default_factory=list)

    @property
    def total_violations(self) -> int:
        return sum(c.violations for c in self.checks)

    def to_text(self) -> str:
        lines = [
            f"property audit: seed={self.seed} polygons={self.n_polygons} "
            f"samples={self.samples_per_polygon}",
        ]
        width = max(len(c.name) for c in self.checks)
        for c in self.checks:
            lines.append(
                f"  {c.name:<{width}}  checked {c.checked:>10}  "
                f"violations {c.violations:>6}  worst {c.worst:.3e}"
            )
        lines.append(f"total violations: {self.total_violations}")
        return "\n".join(lines) + "\n"


def _adjacent(i: np.ndarray, j: np.ndarray, n: int) -> np.ndarray:
    d = (i - j) % n
    return (d == 1) | (d == n - 1) | (d == 0)


def audit_polygon(
    p: Polygon,
    rng: np.random.Generator,
    samples: int,
    tol: AuditTolerances,
    checks: dict[str, CheckCounter],
    fd_samples: int = 10,
) -> None:
    """Run every audited property on one unit-diameter polygon."""
    gc: GeometricConstants = geometric_constants(p)
    n = p.n
    x = sample_interior(p, rng, samples, margin=1e-7 * p.diameter)
    g = point_geometry_batch(p, x, gradients=True)

    c = checks["angle sum 2pi"]
    err = np.abs(g.alpha.sum(axis=1) - 2.0 * np.pi)
    c.add(samples, np.count_nonzero(err > tol.angle_sum), err.max())

    # The separation radius is computed as a supremum, so it can equal
    # d_min/2 exactly (the unit square does); the audited bound is <=.
    c = checks["h* at most half min vertex gap"]
    half = 0.5 * min_vertex_distance(p)
    c.add(1, 0 if gc.h_star <= half * (1.0 + 1e-12) else 1, gc.h_star / half)

    small_r = g.r < gc.h_star
    big_a = g.alpha > gc.alpha_star

    c = checks["at most one vertex within h*"]
    cnt = small_r.sum(axis=1)
    c.add(samples, np.count_nonzero(cnt > 1), float(cnt.max()))

    c = checks["at most one angle above alpha*"]
    cnt = big_a.sum(axis=1)
    c.add(samples, np.count_nonzero(cnt > 1), float(cnt.max()))

    c = checks["close vertex belongs to the wide edge"]
    bad = 0
    rows, ii = np.nonzero(big_a)
    for row, i in zip(rows, ii):
        js = np.nonzero(small_r[row])[0]
        bad += int(np.any((js != i) & (js != (i + 1) % n)))
    c.add(len(rows) if len(rows) else samples, bad, float(bad))

    c = checks["close vertex has wide adjacent angles"]
    rows, ii = np.nonzero(small_r)
    if len(rows):
        spread = g.alpha[rows, (ii - 1) % n] + g.alpha[rows, ii]
        viol = spread <= 2.0 * np.pi / 3.0
        c.add(len(rows), int(np.count_nonzero(viol)), float((2.0 * np.pi / 3.0 - spread).max()))
    else:
        c.add(samples, 0, 0.0)

    c = checks["grad alpha bounded by 1/r_i + 1/r_{i+1}"]
    bound = 1.0 / g.r + 1.0 / np.roll(g.r, -1, axis=1)
    norm = np.hypot(g.grad_alpha[:, :, 0], g.grad_alpha[:, :, 1])
    rel = norm / bound - 1.0
    c.add(samples * n, np.count_nonzero(rel > tol.grad_alpha_slack), rel.max())

    c = checks["ball below h* meets <= 2 adjacent edges"]
    h_test = gc.h_star * (1.0 - 1e-9)
    dist = p.edge_distances(x)
    hit = dist <= h_test
    cnt = hit.sum(axis=1)
    bad = np.count_nonzero(cnt > 2)
    two = np.nonzero(cnt == 2)[0]
    if len(two):
        first = np.argmax(hit[two], axis=1)
        last = n - 1 - np.argmax(hit[two][:, ::-1], axis=1)
        bad += int(np.count_nonzero(~_adjacent(first, last, n)))
    c.add(samples, bad, float(cnt.max()))

    c = checks["weight sum >= 2pi (unit diameter)"]
    t_prev = np.roll(g.t, 1, axis=1)
    wsum = ((t_prev + g.t) / g.r).sum(axis=1)
    c.add(samples, np.count_nonzero(wsum < 2.0 * np.pi - tol.weight_sum_slack),
          float((2.0 * np.pi - wsum).max()))

    # Gradient identities are evaluated on their own, less boundary-hugging
    # sample set: the quotient rule runs through intermediates that grow
    # like 1/distance, so the identity residual picks up roundoff roughly
    # like eps/distance^1.5 and a 1e-9 tolerance is only meaningful with
    # some standoff. Values are identity-protected and keep the tight set.
    xg = sample_interior(p, rng, samples, margin=1e-3 * p.diameter)

    pairs = (
        ("mvc", mvc_values, mvc_gradients),
        ("wachspress", wachspress_values, wachspress_gradients),
    )
    for kind, val_fn, grad_fn in pairs:
        lam = val_fn(p, x)

        c = checks[f"nonnegative ({kind})"]
        c.add(samples * n, np.count_nonzero(lam < tol.nonnegative), float((-lam).max()))

        c = checks[f"partition of unity ({kind})"]
        err = np.abs(lam.sum(axis=1) - 1.0)
        c.add(samples, np.count_nonzero(err > tol.partition), err.max())

        c = checks[f"linear precision ({kind})"]
        err = np.abs(lam @ p.vertices - x).max(axis=1)
        c.add(samples, np.count_nonzero(err > tol.linear_precision * p.diameter), err.max())

        glam = grad_fn(p, xg).gradients

        c = checks[f"grad sum zero ({kind})"]
        err = np.abs(glam.sum(axis=1)).max(axis=1)
        c.add(samples, np.count_nonzero(err > tol.grad_sum), err.max())

        c = checks[f"grad linear precision ({kind})"]
        jac = np.einsum("ia,mib->mab", p.vertices, glam)
        err = np.abs(jac - np.eye(2)).reshape(samples, 4).max(axis=1)
        c.add(samples, np.count_nonzero(err > tol.grad_sum), err.max())

        c = checks[f"analytic vs FD gradient ({kind})"]
        xf = sample_interior(p, rng, fd_samples, margin=0.01 * p.diameter)
        ana = grad_fn(p, xf).gradients
        fd = fd_gradient(p, xf, kind=kind)
        num = np.hypot(*(ana - fd).transpose(2, 0, 1))
        den = np.maximum(np.hypot(*ana.transpose(2, 0, 1)), 0.01)
        rel = num / den
        c.add(fd_samples * n, np.count_nonzero(rel > tol.fd_match), rel.max())


AUDIT_CHECK_NAMES = [
    "angle sum 2pi",
    "h* at most half min vertex gap",
    "at most one vertex within h*",
    "at most one angle above alpha*",
    "close vertex belongs to the wide edge",
    "close vertex has wide adjacent angles",
    "grad alpha bounded by 1/r_i + 1/r_{i+1}",
    "ball below h* meets <= 2 adjacent edges",
    "weight sum >= 2pi (unit diameter)",
    "nonnegative (mvc)",
    "partition of unity (mvc)",
    "linear precision (mvc)",
    "grad sum zero (mvc)",
    "grad linear precision (mvc)",
    "analytic vs FD gradient (mvc)",
    "nonnegative (wachspress)",
    "partition of unity (wachspress)",
    "linear precision (wachspress)",
    "grad sum zero (wachspress)",
    "grad linear precision (wachspress)",
    "analytic vs FD gradient (wachspress)",
]


def run_property_audit(
    n_polygons: int = 100,
    samples_per_polygon: int = 10_000,
    seed: int = 42,
    tolerances: AuditTolerances | None = None,
) -> PropertyAuditReport:
    """Audit every property over freshly generated random polygons."""
    tol = AuditTolerances() if tolerances is None else tolerances
    rng = np.random.default_rng(seed)
    checks = {name: CheckCounter(name) for name in AUDIT_CHECK_NAMES}
    for _ in range(n_polygons):
        p = random_convex_polygon(rng)
        audit_polygon(p, rng, samples_per_polygon, tol, checks)
    return PropertyAuditReport(
        seed=seed,
        n_polygons=n_polygons,
        samples_per_polygon=samples_per_polygon,
        checks=list(checks.values()),
    )
