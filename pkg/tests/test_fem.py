"""Octagonal-element Poisson solver: meshing, assembly, solve, convergence."""

import json

import numpy as np
import pytest
import scipy.sparse as sp
from numpy.testing import assert_allclose

from mvcoords.coords import mvc_values
from mvcoords.errors import NoConvergence
from mvcoords.fem import (
    ConvergenceReport,
    LinearSystem,
    assemble,
    build_mesh,
    convergence_study,
    save_mesh,
    solution_errors,
    solve,
)
from mvcoords.interp import field_linear, field_sin_exp

# measured once with the default rules (assembly degree 8 / subdivision 1,
# error norms degree 10 / subdivision 2) and frozen; the study is
# deterministic so these are exact to quadrature and solver tolerance
STUDY_LEVELS = [2, 4, 8, 16]
STUDY_L2 = [3.528115534700e-03, 8.661122819589e-04, 2.178271260571e-04, 5.492196187167e-05]
STUDY_H1 = [7.571734796779e-02, 3.605226659397e-02, 1.765062623080e-02, 8.749081843892e-03]


def diag_system(diag, rhs):
    """Wrap a small dense matrix as a LinearSystem with no boundary."""
    m = sp.csr_matrix(np.asarray(diag, dtype=float))
    rhs = np.asarray(rhs, dtype=float)
    return LinearSystem(
        matrix=m,
        rhs=rhs,
        dof_map=np.arange(rhs.size),
        boundary_index=np.array([], dtype=np.int64),
        boundary_values=np.array([]),
        full_matrix=m,
        n_nodes=rhs.size,
    )


@pytest.fixture(scope="module")
def study():
    return convergence_study(STUDY_LEVELS)


# -------------------------------------------------------------------- meshing

def test_single_element_mesh():
    mesh = build_mesh(1)
    assert mesh.n_nodes == 8
    assert mesh.n_elements == 1
    assert len(mesh.boundary_nodes) == 8


def test_two_by_two_mesh_counts():
    """9 corners plus 12 edge midpoints, four cells, 16 nodes on the rim."""
    mesh = build_mesh(2)
    assert mesh.n_nodes == 21
    assert mesh.n_elements == 4
    assert len(mesh.boundary_nodes) == 16


@pytest.mark.parametrize("n", [1, 2, 3, 4, 7])
def test_node_count_formula(n):
    mesh = build_mesh(n)
    assert mesh.n_nodes == (n + 1) ** 2 + 2 * n * (n + 1)
    assert mesh.n_elements == n * n


def test_invalid_size_rejected():
    with pytest.raises(ValueError):
        build_mesh(0)


def test_elements_are_degenerate_octagons():
    """Every element is a CCW 8-node loop with area 1/n² and the
    corner/midside angle pattern 90, 180, 90, 180, ..."""
    mesh = build_mesh(3)
    want = np.radians([90.0, 180.0] * 4)
    for e in range(mesh.n_elements):
        poly = mesh.element_polygon(e)
        assert poly.area == pytest.approx(1.0 / 9.0, rel=1e-12)
        assert_allclose(poly.interior_angles, want, atol=1e-12)


def test_boundary_tags_match_coordinates():
    mesh = build_mesh(4)
    on_rim = np.zeros(mesh.n_nodes, dtype=bool)
    on_rim[mesh.boundary_nodes] = True
    x, y = mesh.nodes[:, 0], mesh.nodes[:, 1]
    geometric = (x == 0.0) | (y == 0.0) | (x == 1.0) | (y == 1.0)
    assert np.array_equal(on_rim, geometric)


def test_every_node_belongs_to_an_element():
    mesh = build_mesh(3)
    assert np.array_equal(np.unique(mesh.elements), np.arange(mesh.n_nodes))


def test_mesh_json_keys_and_round_trip(tmp_path):
    mesh = build_mesh(2)
    doc = json.loads(mesh.to_json())
    assert set(doc) == {"nodes", "elements", "boundary"}
    assert len(doc["nodes"]) == 21
    assert len(doc["elements"]) == 4
    assert all(len(loop) == 8 for loop in doc["elements"])

    path = tmp_path / "mesh.json"
    save_mesh(mesh, path)
    again = json.loads(path.read_text())
    assert again == doc


# ------------------------------------------------------------------- assembly

def test_stiffness_row_sums_vanish():
    """Partition of unity makes the gradients sum to zero, so every row of
    the pre-elimination stiffness matrix sums to zero."""
    system = assemble(build_mesh(2), field_sin_exp())
    row_sums = np.asarray(system.full_matrix.sum(axis=1)).ravel()
    assert np.abs(row_sums).max() < 1e-9


def test_stiffness_symmetric():
    system = assemble(build_mesh(3), field_sin_exp())
    asym = abs(system.full_matrix - system.full_matrix.T).max()
    assert asym < 1e-12


def test_harmonic_load_is_pure_boundary_lift():
    """sin(x)e^y has zero Laplacian, so the reduced right-hand side is
    exactly the Dirichlet lift -K_fb u_b."""
    system = assemble(build_mesh(2), field_sin_exp())
    free, bnd = system.dof_map, system.boundary_index
    lift = -(system.full_matrix[free][:, bnd] @ system.boundary_values)
    assert_allclose(system.rhs, lift, rtol=0.0, atol=1e-13)


def test_reduced_system_excludes_boundary():
    system = assemble(build_mesh(2), field_sin_exp())
    assert np.intersect1d(system.dof_map, system.boundary_index).size == 0
    assert system.dof_map.size + system.boundary_index.size == system.n_nodes
    assert system.matrix.shape == (system.dof_map.size,) * 2


# ---------------------------------------------------------------------- solve

def test_identity_system_solved_in_one_iteration():
    rhs = np.array([3.0, -1.0, 2.0, 0.5, 4.0])
    x = solve(diag_system(np.eye(5), rhs), max_iter=1)
    assert_allclose(x, rhs, rtol=0.0, atol=0.0)


def test_zero_rhs_short_circuits():
    x = solve(diag_system(np.eye(3), np.zeros(3)))
    assert_allclose(x, 0.0, atol=0.0)


def test_non_positive_diagonal_raises():
    with pytest.raises(NoConvergence):
        solve(diag_system([[1.0, 0.0], [0.0, -1.0]], [1.0, 1.0]))


def test_indefinite_matrix_raises():
    # positive diagonal but eigenvalues 3 and -1: CG meets negative curvature
    with pytest.raises(NoConvergence):
        solve(diag_system([[1.0, 2.0], [2.0, 1.0]], [1.0, 0.0]))


def test_iteration_cap_raises():
    system = assemble(build_mesh(2), field_sin_exp())
    with pytest.raises(NoConvergence):
        solve(system, max_iter=1)


def test_reduced_residual_below_tolerance():
    system = assemble(build_mesh(2), field_sin_exp())
    coeffs = solve(system)
    res = system.matrix @ coeffs[system.dof_map] - system.rhs
    assert np.linalg.norm(res) <= 1e-10 * np.linalg.norm(system.rhs)


def test_boundary_coefficients_are_exact():
    mesh = build_mesh(4)
    u = field_sin_exp()
    coeffs = solve(assemble(mesh, u))
    bnd = mesh.boundary_nodes
    assert_allclose(coeffs[bnd], u.value(mesh.nodes[bnd]), rtol=0.0, atol=0.0)


# ----------------------------------------------------------------- patch test

@pytest.mark.parametrize("n", [1, 2, 4])
def test_affine_patch_reproduced_at_nodes(n):
    """An affine field solves the discrete problem exactly: the nodal
    coefficients match the field and both error norms sit at solver
    tolerance. n = 1 also covers the empty reduced system (every node
    of the single element is a boundary node)."""
    u = field_linear(2.0, -3.0, 0.5)
    mesh = build_mesh(n)
    coeffs = solve(assemble(mesh, u))
    assert np.abs(coeffs - u.value(mesh.nodes)).max() < 1e-9
    l2, h1 = solution_errors(mesh, coeffs, u)
    assert l2 < 1e-9
    assert h1 < 1e-9


def test_linear_study_flags_rates():
    """Errors at roundoff level carry no rate information, so the report
    flags them instead of printing log2 of noise."""
    report = convergence_study([1, 2], u_exact=field_linear(1.0, 1.0, 0.0))
    assert all(e < 1e-9 for e in report.l2_errors)
    assert all(e < 1e-9 for e in report.h1_errors)
    assert all(np.isnan(r) for r in report.l2_rates)
    assert all(np.isnan(r) for r in report.h1_rates)
    # flagged cells render blank, not "nan"
    assert "nan" not in report.to_csv()
    assert "nan" not in report.to_markdown()
    assert json.loads(report.to_json())["l2_rates"] == [None]


# ----------------------------------------------------------------- conformity

def edge_traces(mesh, e, pts):
    """Map global node index -> basis values of that node's hat on pts,
    evaluated inside element e."""
    vals = mvc_values(mesh.element_polygon(e), pts)
    return {int(g): vals[:, k] for k, g in enumerate(mesh.elements[e])}


@pytest.mark.parametrize(
    "pair, start, end, normal",
    [
        ((0, 1), (0.5, 0.0), (0.5, 0.5), (1.0, 0.0)),  # vertical shared edge
        ((0, 2), (0.0, 0.5), (0.5, 0.5), (0.0, 1.0)),  # horizontal shared edge
    ],
)
def test_basis_conforms_across_shared_edges(pair, start, end, normal):
    """Traces from the two sides of a shared edge agree: 10 sample points
    per edge, offset 1e-7 into each element, agreement within 1e-5. Nodes
    private to one element must trace to ~0 there, so those are compared
    against a zero trace from the other side."""
    mesh = build_mesh(2)
    ea, eb = pair
    start, end, normal = map(np.asarray, (start, end, normal))
    t = ((np.arange(10) + 0.5) / 10)[:, None]
    on_edge = start + t * (end - start)
    side_a = edge_traces(mesh, ea, on_edge - 1e-7 * normal)
    side_b = edge_traces(mesh, eb, on_edge + 1e-7 * normal)
    zero = np.zeros(10)
    for g in set(side_a) | set(side_b):
        gap = np.abs(side_a.get(g, zero) - side_b.get(g, zero)).max()
        assert gap < 1e-5, f"node {g} jumps by {gap:.3e} across the edge"


# ---------------------------------------------------------------- convergence

def test_frozen_study_values(study):
    assert study.ns == STUDY_LEVELS
    assert study.hs == [0.5, 0.25, 0.125, 0.0625]
    assert_allclose(study.l2_errors, STUDY_L2, rtol=1e-9)
    assert_allclose(study.h1_errors, STUDY_H1, rtol=1e-9)


def test_l2_converges_at_second_order(study):
    assert_allclose(study.l2_rates, [2.026, 1.991, 1.988], atol=5e-3)
    assert study.l2_rates[-1] == pytest.approx(2.0, abs=0.05)


def test_h1_converges_at_first_order(study):
    assert_allclose(study.h1_rates, [1.071, 1.030, 1.013], atol=5e-3)
    assert study.h1_rates[-1] == pytest.approx(1.0, abs=0.05)


def test_error_quadrature_refinement_insensitive():
    """One extra subdivision of the error rule moves the reported norms by
    far less than the rate tolerances care about."""
    mesh = build_mesh(4)
    u = field_sin_exp()
    coeffs = solve(assemble(mesh, u))
    l2_a, h1_a = solution_errors(mesh, coeffs, u, 10, 2)
    l2_b, h1_b = solution_errors(mesh, coeffs, u, 10, 3)
    assert abs(l2_a - l2_b) / l2_a < 1e-3
    assert abs(h1_a - h1_b) / h1_a < 1e-3


def test_levels_must_be_strictly_increasing():
    with pytest.raises(ValueError):
        convergence_study([4, 2])
    with pytest.raises(ValueError):
        convergence_study([2, 2, 4])


def test_single_level_study_has_no_rates():
    report = convergence_study([2])
    assert report.l2_rates == []
    assert report.h1_rates == []


# -------------------------------------------------------------- report output

def test_report_csv_format(study):
    lines = study.to_csv().strip().split("\n")
    assert lines[0] == "n,h,l2_error,l2_rate,h1_error,h1_rate"
    assert len(lines) == 1 + len(STUDY_LEVELS)
    first = lines[1].split(",")
    assert first[0] == "2"
    assert first[3] == "" and first[5] == ""  # no rate on the first row
    assert lines[2].split(",")[3] == "2.03"


def test_report_markdown_format(study):
    lines = study.to_markdown().strip().split("\n")
    assert lines[0] == "| n | L2 error | rate | H1 error | rate |"
    assert lines[1].startswith("|---")
    assert "| - |" in lines[2]
    assert "| 16 |" in lines[-1]


def test_report_json_round_trip(study):
    doc = json.loads(study.to_json())
    assert [row["n"] for row in doc["levels"]] == STUDY_LEVELS
    # JSON carries full precision, not the 6-digit table formatting
    assert doc["levels"][0]["l2_error"] == study.l2_errors[0]
    assert len(doc["l2_rates"]) == len(STUDY_LEVELS) - 1
    assert doc["h1_rates"][-1] == pytest.approx(1.013, abs=5e-3)
