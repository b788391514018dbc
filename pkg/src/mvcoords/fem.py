"""Poisson solver on meshes of squares with mid-side nodes.

Each element is an octagon whose four extra vertices sit at edge
midpoints (interior angles of pi), with mean value coordinates as the
element basis. The pipeline is standard Galerkin: assemble the stiffness
matrix and load vector, eliminate Dirichlet rows against exact nodal
boundary values, solve with Jacobi-preconditioned conjugate gradients,
and measure errors against the manufactured solution.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .coords import mvc_gradients
from .errors import NoConvergence
from .geometry import Polygon
from .interp import QuadratureRule, ScalarField, fan_quadrature, field_sin_exp

DEFAULT_ASSEMBLY_RULE = (8, 1)
DEFAULT_ERROR_RULE = (10, 2)


@dataclass(frozen=True)
class Mesh:
    """Nodes, 8-node CCW element loops, and boundary node indices."""

    nodes: np.ndarray
    elements: np.ndarray
    boundary_nodes: np.ndarray
    n: int

    @property
    def n_nodes(self) -> int:
        return self.nodes.shape[0]

    @property
    def n_elements(self) -> int:
        return self.elements.shape[0]

    def element_polygon(self, e: int) -> Polygon:
        return Polygon(self.nodes[self.elements[e]])

    def to_json(self) -> str:
        return json.dumps({
            "nodes": self.nodes.tolist(),
            "elements": self.elements.tolist(),
            "boundary": self.boundary_nodes.tolist(),
        })


def save_mesh(mesh: Mesh, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(mesh.to_json())


def build_mesh(n: int) -> Mesh:
    """n-by-n mesh of [0,1]²: unit squares scaled by 1/n, each element an
    8-node loop corner, mid-side, corner, ... in CCW order.

    Node layout: (n+1)² corners, then n(n+1) horizontal-edge midpoints,
    then (n+1)n vertical-edge midpoints.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    ii, jj = np.meshgrid(np.arange(n + 1), np.arange(n + 1), indexing="ij")
    corners = np.column_stack([ii.ravel(order="F") / n, jj.ravel(order="F") / n])

    def corner(i, j):
        return j * (n + 1) + i

    n_c = (n + 1) * (n + 1)
    ii, jj = np.meshgrid(np.arange(n), np.arange(n + 1), indexing="ij")
    hmid = np.column_stack([(ii.ravel(order="F") + 0.5) / n, jj.ravel(order="F") / n])

    def hm(i, j):
        return n_c + j * n + i

    n_h = n * (n + 1)
    ii, jj = np.meshgrid(np.arange(n + 1), np.arange(n), indexing="ij")
    vmid = np.column_stack([ii.ravel(order="F") / n, (jj.ravel(order="F") + 0.5) / n])

    def vm(i, j):
        return n_c + n_h + j * (n + 1) + i

    nodes = np.concatenate([corners, hmid, vmid])
    elems = np.empty((n * n, 8), dtype=np.int64)
    k = 0
    for j in range(n):
        for i in range(n):
            elems[k] = [
                corner(i, j), hm(i, j), corner(i + 1, j), vm(i + 1, j),
                corner(i + 1, j + 1), hm(i, j + 1), corner(i, j + 1), vm(i, j),
            ]
            k += 1
    on_edge = (
        (nodes[:, 0] == 0.0) | (nodes[:, 1] == 0.0)
        | (np.abs(nodes[:, 0] - 1.0) < 1e-15) | (np.abs(nodes[:, 1] - 1.0) < 1e-15)
    )
    return Mesh(
        nodes=nodes,
        elements=elems,
        boundary_nodes=np.flatnonzero(on_edge),
        n=n,
    )


@dataclass
class LinearSystem:
    """Reduced SPD system plus the data to reconstruct full coefficients."""

    matrix: sp.csr_matrix
    rhs: np.ndarray
    dof_map: np.ndarray
    boundary_index: np.ndarray
    boundary_values: np.ndarray
    full_matrix: sp.csr_matrix
    n_nodes: int


def _reference_layout(mesh: Mesh) -> tuple[Polygon, np.ndarray] | None:
    """If all elements are translates of element 0 (to 1e-12 of the element
    size), return its polygon and the per-element origins; else None."""
    coords = mesh.nodes[mesh.elements]
    local = coords - coords[:, :1, :]
    size = float(np.max(np.abs(local[0])))
    if np.max(np.abs(local - local[0])) > 1e-12 * max(size, 1e-300):
        return None
    return Polygon(local[0]), coords[:, 0, :]


def _tabulate(mesh: Mesh, degree: int, subdivision: int):
    """Reference-element quadrature rule and basis tables shared by all
    elements; falls back to None for non-uniform meshes."""
    layout = _reference_layout(mesh)
    if layout is None:
        return None
    ref, origins = layout
    rule = fan_quadrature(ref, degree=degree, subdivision=subdivision)
    basis = mvc_gradients(ref, rule.points)
    return rule, basis, origins


def assemble(
    mesh: Mesh,
    u_exact: ScalarField,
    degree: int = DEFAULT_ASSEMBLY_RULE[0],
    subdivision: int = DEFAULT_ASSEMBLY_RULE[1],
) -> LinearSystem:
    """Stiffness and load for -Δu = f with f = u_exact.source, Dirichlet
    data u_exact on the boundary nodes, eliminated by rhs lift."""
    n_nodes = mesh.n_nodes
    tab = _tabulate(mesh, degree, subdivision)
    b_full = np.zeros(n_nodes)
    if tab is not None:
        rule, basis, origins = tab
        g = basis.gradients
        k_loc = np.einsum("q,qia,qja->ij", rule.weights, g, g)
        n_el = mesh.n_elements
        rows = np.repeat(mesh.elements, 8, axis=1).ravel()
        cols = np.tile(mesh.elements, (1, 8)).ravel()
        data = np.tile(k_loc.ravel(), n_el)
        pts = origins[:, None, :] + rule.points[None, :, :]
        f = u_exact.source(pts.reshape(-1, 2)).reshape(n_el, -1)
        load = np.einsum("eq,q,qi->ei", f, rule.weights, basis.values)
        np.add.at(b_full, mesh.elements.ravel(), load.ravel())
    else:
        row_parts, col_parts, data_parts = [], [], []
        for e in range(mesh.n_elements):
            poly = mesh.element_polygon(e)
            rule = fan_quadrature(poly, degree=degree, subdivision=subdivision)
            basis = mvc_gradients(poly, rule.points)
            g = basis.gradients
            k_loc = np.einsum("q,qia,qja->ij", rule.weights, g, g)
            idx = mesh.elements[e]
            row_parts.append(np.repeat(idx, 8))
            col_parts.append(np.tile(idx, 8))
            data_parts.append(k_loc.ravel())
            f = u_exact.source(rule.points)
            np.add.at(b_full, idx, basis.values.T @ (rule.weights * f))
        rows = np.concatenate(row_parts)
        cols = np.concatenate(col_parts)
        data = np.concatenate(data_parts)
    k_full = sp.coo_matrix((data, (rows, cols)), shape=(n_nodes, n_nodes)).tocsr()

    bnd = mesh.boundary_nodes
    free = np.setdiff1d(np.arange(n_nodes), bnd)
    ub = u_exact.value(mesh.nodes[bnd])
    k_ff = k_full[free][:, free].tocsr()
    k_fb = k_full[free][:, bnd]
    rhs = b_full[free] - k_fb @ ub
    return LinearSystem(
        matrix=k_ff,
        rhs=rhs,
        dof_map=free,
        boundary_index=bnd,
        boundary_values=ub,
        full_matrix=k_full,
        n_nodes=n_nodes,
    )


def solve(system: LinearSystem, tol: float = 1e-10, max_iter: int | None = None) -> np.ndarray:
    """Jacobi-preconditioned conjugate gradients on the reduced system;
    returns the full nodal coefficient vector (boundary values included).

    Raises NoConvergence when the iteration cap (default 10x the free DOF
    count) is hit or the matrix reveals itself as not positive definite.
    """
    a = system.matrix
    b = system.rhs
    n_free = b.shape[0]
    coeffs = np.empty(system.n_nodes)
    coeffs[system.boundary_index] = system.boundary_values
    if n_free == 0:
        return coeffs
    if max_iter is None:
        max_iter = 10 * n_free
    diag = a.diagonal()
    if np.any(diag <= 0.0):
        raise NoConvergence("non-positive diagonal entry; system is not SPD")
    b_norm = float(np.linalg.norm(b))
    if b_norm == 0.0:
        coeffs[system.dof_map] = 0.0
        return coeffs
    x = np.zeros(n_free)
    r = b.copy()
    z = r / diag
    p = r / diag
    rz = float(r @ z)
    converged = False
    for _ in range(max_iter):
        ap = a @ p
        pap = float(p @ ap)
        if pap <= 0.0:
            raise NoConvergence("curvature p.Ap <= 0; system is not positive definite")
        alpha = rz / pap
        x += alpha * p
        r -= alpha * ap
        if np.linalg.norm(r) <= tol * b_norm:
            converged = True
            break
        z = r / diag
        rz_new = float(r @ z)
        p = z + (rz_new / rz) * p
        rz = rz_new
    if not converged:
        raise NoConvergence(f"no convergence in {max_iter} iterations")
    coeffs[system.dof_map] = x
    return coeffs


def solution_errors(
    mesh: Mesh,
    coeffs: np.ndarray,
    u_exact: ScalarField,
    degree: int = DEFAULT_ERROR_RULE[0],
    subdivision: int = DEFAULT_ERROR_RULE[1],
    chunk: int = 256,
) -> tuple[float, float]:
    """Quadrature L2 and H1-seminorm errors of the discrete solution."""
    coeffs = np.asarray(coeffs, dtype=float)
    tab = _tabulate(mesh, degree, subdivision)
    l2_sq = 0.0
    h1_sq = 0.0
    if tab is not None:
        rule, basis, origins = tab
        w = rule.weights
        for start in range(0, mesh.n_elements, chunk):
            sl = slice(start, start + chunk)
            nodal = coeffs[mesh.elements[sl]]
            pts = (origins[sl][:, None, :] + rule.points[None, :, :]).reshape(-1, 2)
            uh = nodal @ basis.values.T
            guh = np.einsum("ei,qia->eqa", nodal, basis.gradients)
            n_e = nodal.shape[0]
            du = u_exact.value(pts).reshape(n_e, -1) - uh
            dg = u_exact.gradient(pts).reshape(n_e, -1, 2) - guh
            l2_sq += float(np.sum(du * du @ w))
            h1_sq += float(np.sum(np.sum(dg * dg, axis=2) @ w))
    else:
        for e in range(mesh.n_elements):
            poly = mesh.element_polygon(e)
            rule = fan_quadrature(poly, degree=degree, subdivision=subdivision)
            basis = mvc_gradients(poly, rule.points)
            nodal = coeffs[mesh.elements[e]]
            du = u_exact.value(rule.points) - basis.values @ nodal
            dg = u_exact.gradient(rule.points) - np.einsum("qia,i->qa", basis.gradients, nodal)
            l2_sq += float(np.dot(rule.weights, du * du))
            h1_sq += float(np.dot(rule.weights, np.sum(dg * dg, axis=1)))
    return float(np.sqrt(l2_sq)), float(np.sqrt(h1_sq))


@dataclass
class ConvergenceReport:
    """Per-level errors and the successive log2 convergence rates."""

    ns: list[int]
    hs: list[float]
    l2_errors: list[float]
    h1_errors: list[float]
    l2_rates: list[float] = field(default_factory=list)
    h1_rates: list[float] = field(default_factory=list)

    def __post_init__(self) -> None:
        if not self.l2_rates:
            self.l2_rates = _rates(self.l2_errors)
        if not self.h1_rates:
            self.h1_rates = _rates(self.h1_errors)

    def to_csv(self) -> str:
        lines = ["n,h,l2_error,l2_rate,h1_error,h1_rate"]
        for k, n in enumerate(self.ns):
            l2r = _format_rate(self.l2_rates, k, "")
            h1r = _format_rate(self.h1_rates, k, "")
            lines.append(
                f"{n},{self.hs[k]:.6g},{self.l2_errors[k]:.6e},{l2r},"
                f"{self.h1_errors[k]:.6e},{h1r}"
            )
        return "\n".join(lines) + "\n"

    def to_markdown(self) -> str:
        lines = [
            "| n | L2 error | rate | H1 error | rate |",
            "|---:|---:|---:|---:|---:|",
        ]
        for k, n in enumerate(self.ns):
            l2r = _format_rate(self.l2_rates, k, "-")
            h1r = _format_rate(self.h1_rates, k, "-")
            lines.append(
                f"| {n} | {self.l2_errors[k]:.6g} | {l2r} |"
                f" {self.h1_errors[k]:.6g} | {h1r} |"
            )
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        return json.dumps({
            "levels": [
                {"n": n, "h": self.hs[k], "l2_error": self.l2_errors[k],
                 "h1_error": self.h1_errors[k]}
                for k, n in enumerate(self.ns)
            ],
            "l2_rates": [None if np.isnan(r) else r for r in self.l2_rates],
            "h1_rates": [None if np.isnan(r) else r for r in self.h1_rates],
        })


def _format_rate(rates: list[float], k: int, blank: str) -> str:
    """Rate cell for row k: blank on the first row and for flagged rates."""
    if k == 0 or np.isnan(rates[k - 1]):
        return blank
    return f"{rates[k - 1]:.2f}"


def _rates(errors: list[float]) -> list[float]:
    out = []
    for a, b in zip(errors, errors[1:]):
        # errors at or below the solver tolerance are roundoff, and a log2
        # ratio of roundoff is noise, so the rate is flagged as undefined
        defined = min(a, b) > 1e-9
        out.append(float(np.log2(a / b)) if defined else float("nan"))
    return out


def convergence_study(
    levels,
    u_exact: ScalarField | None = None,
    assembly_rule: tuple[int, int] = DEFAULT_ASSEMBLY_RULE,
    error_rule: tuple[int, int] = DEFAULT_ERROR_RULE,
    tol: float = 1e-10,
) -> ConvergenceReport:
    """Solve the Dirichlet problem on each mesh level and report errors
    and rates. Levels must be strictly increasing."""
    levels = [int(n) for n in levels]
    if any(b <= a for a, b in zip(levels, levels[1:])):
        raise ValueError("levels must be strictly increasing")
    if u_exact is None:
        u_exact = field_sin_exp()
    l2s, h1s = [], []
    for n in levels:
        mesh = build_mesh(n)
        system = assemble(mesh, u_exact, *assembly_rule)
        coeffs = solve(system, tol=tol)
        l2, h1 = solution_errors(mesh, coeffs, u_exact, *error_rule)
        l2s.append(l2)
        h1s.append(h1)
    return ConvergenceReport(
        ns=levels,
        hs=[1.0 / n for n in levels],
        l2_errors=l2s,
        h1_errors=h1s,
    )
