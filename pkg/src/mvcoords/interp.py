"""Quadrature on convex polygons, barycentric interpolation, and the
error measures for it.

Integration uses symmetric Gauss rules on a fan triangulation about the
vertex centroid; the interpolant is the mean value coordinate combination
of vertex values.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .coords import mvc_gradients, mvc_values
from .errors import DegenerateDenominator, UnsupportedDegree
from .geometry import Polygon

# Symmetric Gauss rules on the triangle (Dunavant). Barycentric abscissae
# with weights normalized to sum to one; multiply by triangle area on use.
_RULE_2 = (
    np.array([
        [2/3, 1/6, 1/6],
        [1/6, 2/3, 1/6],
        [1/6, 1/6, 2/3],
    ]),
    np.array([1/3, 1/3, 1/3]),
)

_B5A = (6.0 - np.sqrt(15.0)) / 21.0
_B5B = (6.0 + np.sqrt(15.0)) / 21.0
_W5A = (155.0 - np.sqrt(15.0)) / 1200.0
_W5B = (155.0 + np.sqrt(15.0)) / 1200.0
_RULE_5 = (
    np.array([
        [1/3, 1/3, 1/3],
        [1 - 2*_B5A, _B5A, _B5A],
        [_B5A, 1 - 2*_B5A, _B5A],
        [_B5A, _B5A, 1 - 2*_B5A],
        [1 - 2*_B5B, _B5B, _B5B],
        [_B5B, 1 - 2*_B5B, _B5B],
        [_B5B, _B5B, 1 - 2*_B5B],
    ]),
    np.array([9/40, _W5A, _W5A, _W5A, _W5B, _W5B, _W5B]),
)

_RULE_8 = (
    np.array([
        [0.333333333333333, 0.333333333333333, 0.333333333333333],
        [0.081414823414554, 0.459292588292723, 0.459292588292723],
        [0.459292588292723, 0.081414823414554, 0.459292588292723],
        [0.459292588292723, 0.459292588292723, 0.081414823414554],
        [0.658861384496480, 0.170569307751760, 0.170569307751760],
        [0.170569307751760, 0.658861384496480, 0.170569307751760],
        [0.170569307751760, 0.170569307751760, 0.658861384496480],
        [0.898905543365938, 0.050547228317031, 0.050547228317031],
        [0.050547228317031, 0.898905543365938, 0.050547228317031],
        [0.050547228317031, 0.050547228317031, 0.898905543365938],
        [0.008394777409958, 0.263112829634638, 0.728492392955404],
        [0.008394777409958, 0.728492392955404, 0.263112829634638],
        [0.263112829634638, 0.008394777409958, 0.728492392955404],
        [0.263112829634638, 0.728492392955404, 0.008394777409958],
        [0.728492392955404, 0.263112829634638, 0.008394777409958],
        [0.728492392955404, 0.008394777409958, 0.263112829634638],
    ]),
    np.array([
        0.144315607677787,
        0.095091634267285, 0.095091634267285, 0.095091634267285,
        0.103217370534718, 0.103217370534718, 0.103217370534718,
        0.032458497623198, 0.032458497623198, 0.032458497623198,
        0.027230314174435, 0.027230314174435, 0.027230314174435,
        0.027230314174435, 0.027230314174435, 0.027230314174435,
    ]),
)

_RULE_10 = (
    np.array([
        [0.333333333333333, 0.333333333333333, 0.333333333333333],
        [0.028844733232685, 0.485577633383657, 0.485577633383657],
        [0.485577633383657, 0.028844733232685, 0.485577633383657],
        [0.485577633383657, 0.485577633383657, 0.028844733232685],
        [0.781036849029926, 0.109481575485037, 0.109481575485037],
        [0.109481575485037, 0.781036849029926, 0.109481575485037],
        [0.109481575485037, 0.109481575485037, 0.781036849029926],
        [0.141707219414880, 0.307939838764121, 0.550352941820999],
        [0.141707219414880, 0.550352941820999, 0.307939838764121],
        [0.307939838764121, 0.141707219414880, 0.550352941820999],
        [0.307939838764121, 0.550352941820999, 0.141707219414880],
        [0.550352941820999, 0.141707219414880, 0.307939838764121],
        [0.550352941820999, 0.307939838764121, 0.141707219414880],
        [0.025003534762686, 0.246672560639903, 0.728323904597411],
        [0.025003534762686, 0.728323904597411, 0.246672560639903],
        [0.246672560639903, 0.025003534762686, 0.728323904597411],
        [0.246672560639903, 0.728323904597411, 0.025003534762686],
        [0.728323904597411, 0.025003534762686, 0.246672560639903],
        [0.728323904597411, 0.246672560639903, 0.025003534762686],
        [0.009540815400299, 0.066803251012200, 0.923655933587500],
        [0.009540815400299, 0.923655933587500, 0.066803251012200],
        [0.066803251012200, 0.009540815400299, 0.923655933587500],
        [0.066803251012200, 0.923655933587500, 0.009540815400299],
        [0.923655933587500, 0.009540815400299, 0.066803251012200],
        [0.923655933587500, 0.066803251012200, 0.009540815400299],
    ]),
    np.array([
        0.090817990382754,
        0.036725957756467, 0.036725957756467, 0.036725957756467,
        0.045321059435528, 0.045321059435528, 0.045321059435528,
        0.072757916845420, 0.072757916845420, 0.072757916845420,
        0.072757916845420, 0.072757916845420, 0.072757916845420,
        0.028327242531057, 0.028327242531057, 0.028327242531057,
        0.028327242531057, 0.028327242531057, 0.028327242531057,
        0.009421666963733, 0.009421666963733, 0.009421666963733,
        0.009421666963733, 0.009421666963733, 0.009421666963733,
    ]),
)

_TRIANGLE_RULES = {2: _RULE_2, 5: _RULE_5, 8: _RULE_8, 10: _RULE_10}

SUPPORTED_DEGREES = tuple(sorted(_TRIANGLE_RULES))
MAX_SUBDIVISION = 3


def triangle_rule(degree: int) -> tuple[np.ndarray, np.ndarray]:
    """Barycentric points (k, 3) and unit-sum weights (k,) for a symmetric
    Gauss rule exact to the given polynomial degree on a triangle."""
    try:
        bary, w = _TRIANGLE_RULES[degree]
    except KeyError:
        raise UnsupportedDegree(
            f"degree {degree} not available; choose from {SUPPORTED_DEGREES}"
        ) from None
    return bary.copy(), w.copy()


@dataclass(frozen=True)
class QuadratureRule:
    """Points and absolute weights over one polygon; weights sum to area."""

    points: np.ndarray
    weights: np.ndarray
    degree: int
    subdivision: int

    @property
    def total_weight(self) -> float:
        return float(np.sum(self.weights))

    def integrate(self, values) -> float:
        return float(np.dot(self.weights, np.asarray(values, dtype=float)))


def _subdivide_4way(tris: np.ndarray) -> np.ndarray:
    """Split each (k, 3, 2) triangle at the edge midpoints into four."""
    a, b, c = tris[:, 0], tris[:, 1], tris[:, 2]
    ab, bc, ca = 0.5 * (a + b), 0.5 * (b + c), 0.5 * (c + a)
    return np.concatenate([
        np.stack([a, ab, ca], axis=1),
        np.stack([ab, b, bc], axis=1),
        np.stack([ca, bc, c], axis=1),
        np.stack([ab, bc, ca], axis=1),
    ])


def fan_triangles(p: Polygon, subdivision: int = 0) -> np.ndarray:
    """Fan triangulation about the vertex centroid, each triangle split
    4-way ``subdivision`` times; returns a (k, 3, 2) array."""
    c = np.broadcast_to(p.centroid, (p.n, 2))
    tris = np.stack([c, p.vertices, np.roll(p.vertices, -1, axis=0)], axis=1)
    for _ in range(subdivision):
        tris = _subdivide_4way(tris)
    return tris


def _map_rule(tris: np.ndarray, degree: int) -> tuple[np.ndarray, np.ndarray]:
    bary, w = triangle_rule(degree)
    pts = np.einsum("qb,kbd->kqd", bary, tris).reshape(-1, 2)
    e1 = tris[:, 1] - tris[:, 0]
    e2 = tris[:, 2] - tris[:, 0]
    areas = 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])
    weights = (areas[:, None] * w[None, :]).reshape(-1)
    return pts, weights


def fan_quadrature(p: Polygon, degree: int = 8, subdivision: int = 1) -> QuadratureRule:
    """Quadrature over the polygon: a symmetric triangle Gauss rule of the
    given degree on the (optionally 4-way refined) centroid fan.

    The rules keep every point strictly inside its sub-triangle, so all
    points are strictly interior to the polygon.
    """
    if subdivision not in range(MAX_SUBDIVISION + 1):
        raise ValueError(f"subdivision must be in 0..{MAX_SUBDIVISION}")
    pts, weights = _map_rule(fan_triangles(p, subdivision), degree)
    return QuadratureRule(points=pts, weights=weights, degree=degree, subdivision=subdivision)


@dataclass(frozen=True)
class ScalarField:
    """Smooth scalar test field with analytic derivatives.

    All callables take an (m, 2) array: ``value`` returns (m,),
    ``gradient`` (m, 2), ``hessian`` (m, 2, 2). ``source`` is the negative
    Laplacian, derived from the hessian trace.
    """

    value: Callable[[np.ndarray], np.ndarray]
    gradient: Callable[[np.ndarray], np.ndarray]
    hessian: Callable[[np.ndarray], np.ndarray]
    name: str = "field"

    def source(self, points: np.ndarray) -> np.ndarray:
        h = self.hessian(np.atleast_2d(np.asarray(points, dtype=float)))
        return -(h[:, 0, 0] + h[:, 1, 1])


def _batch(points) -> np.ndarray:
    return np.atleast_2d(np.asarray(points, dtype=float))


def field_linear(a: float = 0.25, bx: float = 1.0, by: float = -2.0) -> ScalarField:
    def val(x):
        x = _batch(x)
        return a + bx * x[:, 0] + by * x[:, 1]

    def grad(x):
        x = _batch(x)
        return np.broadcast_to(np.array([bx, by]), (x.shape[0], 2)).copy()

    def hess(x):
        x = _batch(x)
        return np.zeros((x.shape[0], 2, 2))

    return ScalarField(val, grad, hess, name=f"{a:g}+{bx:g}x+{by:g}y")


def field_x2() -> ScalarField:
    def hess(x):
        h = np.zeros((_batch(x).shape[0], 2, 2))
        h[:, 0, 0] = 2.0
        return h

    return ScalarField(
        value=lambda x: _batch(x)[:, 0] ** 2,
        gradient=lambda x: np.stack([2.0 * _batch(x)[:, 0], np.zeros(_batch(x).shape[0])], axis=1),
        hessian=hess,
        name="x^2",
    )


def field_xy() -> ScalarField:
    def hess(x):
        h = np.zeros((_batch(x).shape[0], 2, 2))
        h[:, 0, 1] = h[:, 1, 0] = 1.0
        return h

    return ScalarField(
        value=lambda x: _batch(x)[:, 0] * _batch(x)[:, 1],
        gradient=lambda x: _batch(x)[:, ::-1].copy(),
        hessian=hess,
        name="xy",
    )


def field_y2() -> ScalarField:
    def hess(x):
        h = np.zeros((_batch(x).shape[0], 2, 2))
        h[:, 1, 1] = 2.0
        return h

    return ScalarField(
        value=lambda x: _batch(x)[:, 1] ** 2,
        gradient=lambda x: np.stack([np.zeros(_batch(x).shape[0]), 2.0 * _batch(x)[:, 1]], axis=1),
        hessian=hess,
        name="y^2",
    )


def field_sin_exp() -> ScalarField:
    """u = sin(x) e^y; harmonic, so its Poisson source vanishes."""

    def val(x):
        x = _batch(x)
        return np.sin(x[:, 0]) * np.exp(x[:, 1])

    def grad(x):
        x = _batch(x)
        ey = np.exp(x[:, 1])
        return np.stack([np.cos(x[:, 0]) * ey, np.sin(x[:, 0]) * ey], axis=1)

    def hess(x):
        x = _batch(x)
        ey = np.exp(x[:, 1])
        s, c = np.sin(x[:, 0]) * ey, np.cos(x[:, 0]) * ey
        return np.stack([np.stack([-s, c], axis=1), np.stack([c, s], axis=1)], axis=1)

    return ScalarField(val, grad, hess, name="sin(x)e^y")


def standard_fields() -> list[ScalarField]:
    """The quadratic/analytic fields used by the estimate-ratio studies."""
    return [field_x2(), field_xy(), field_y2(), field_sin_exp()]


def interpolate(p: Polygon, nodal_values, points):
    """Mean value interpolant Σ_i nodal_values[i] λ_i at the points."""
    nodal = np.asarray(nodal_values, dtype=float)
    if nodal.shape != (p.n,):
        raise ValueError(f"need {p.n} nodal values")
    lam = mvc_values(p, points)
    return lam @ nodal


def error_norms(p: Polygon, u: ScalarField, rule: QuadratureRule) -> tuple[float, float]:
    """L2 norm and H1 seminorm of u - Iu under the given rule, with the
    interpolant's gradient taken analytically."""
    nodal = u.value(p.vertices)
    basis = mvc_gradients(p, rule.points)
    iu = basis.values @ nodal
    giu = np.einsum("mnd,n->md", basis.gradients, nodal)
    diff = u.value(rule.points) - iu
    gdiff = u.gradient(rule.points) - giu
    l2 = float(np.sqrt(np.dot(rule.weights, diff * diff)))
    h1 = float(np.sqrt(np.dot(rule.weights, np.sum(gdiff * gdiff, axis=1))))
    return l2, h1


def h2_seminorm(u: ScalarField, rule: QuadratureRule) -> float:
    """Quadrature H2 seminorm of the field: sqrt(∫ uxx² + uxy² + uyy²)."""
    h = u.hessian(rule.points)
    dens = h[:, 0, 0] ** 2 + h[:, 0, 1] ** 2 + h[:, 1, 1] ** 2
    return float(np.sqrt(np.dot(rule.weights, dens)))


def estimate_ratio(p: Polygon, u: ScalarField, rule: QuadratureRule) -> float:
    """H1-seminorm error of the interpolant divided by diameter times the
    H2 seminorm of the field: the dimensionless quantity whose boundedness
    is the first-order interpolation estimate. The seminorm (not the full
    H1 norm) keeps the ratio exactly invariant under uniform scaling of
    the polygon-and-field pair.

    Fields with (numerically) vanishing H2 seminorm return 0 when the
    error also vanishes, as for linear fields; otherwise the ratio is
    undefined and DegenerateDenominator is raised.
    """
    _, err = error_norms(p, u, rule)
    h2 = h2_seminorm(u, rule)
    denom = p.diameter * h2
    if h2 < 1e-14:
        # linear fields carry about 1e-12 of gradient roundoff in the H1
        # residual; anything orders of magnitude above that means the
        # field's hessian disagrees with its value/gradient callables
        if err <= 1e-9 * max(1.0, float(np.max(np.abs(u.value(p.vertices))))):
            return 0.0
        raise DegenerateDenominator(
            f"H2 seminorm {h2:g} vanishes but the H1 error {err:g} does not"
        )
    return float(err / denom)
