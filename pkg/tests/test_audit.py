"""Randomized property audit: generator quality, determinism, controls."""

import numpy as np
import pytest

from mvcoords.audit import (
    AUDIT_CHECK_NAMES,
    AuditTolerances,
    random_convex_polygon,
    run_property_audit,
    sample_interior,
)
from mvcoords.geometry import Polygon, min_vertex_distance


def test_random_polygons_meet_quality_bounds():
    """Generated polygons are unit diameter, chunky, and well separated, so
    the audited properties apply to them without further screening."""
    rng = np.random.default_rng(7)
    for _ in range(20):
        p = random_convex_polygon(rng)
        assert 5 <= len(p.vertices) <= 10
        assert p.diameter == pytest.approx(1.0, abs=1e-9)
        assert p.diameter / p.inradius < 6.0
        assert min_vertex_distance(p) >= 0.1


def test_sample_interior_respects_margin():
    square = Polygon([(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)])
    rng = np.random.default_rng(11)
    pts = sample_interior(square, rng, 500, margin=0.05)
    assert pts.shape == (500, 2)
    dist = square.edge_distances(pts).min(axis=1)
    assert dist.min() >= 0.05 - 1e-12


def test_small_audit_run_is_clean():
    report = run_property_audit(5, 300, seed=3)
    assert report.total_violations == 0
    assert [c.name for c in report.checks] == AUDIT_CHECK_NAMES
    by_name = {c.name: c for c in report.checks}
    # per-sample checks saw every sample, per-polygon checks one per polygon
    assert by_name["angle sum 2pi"].checked == 5 * 300
    assert by_name["h* at most half min vertex gap"].checked == 5


def test_audit_is_deterministic():
    a = run_property_audit(3, 200, seed=9)
    b = run_property_audit(3, 200, seed=9)
    assert a.to_text() == b.to_text()


def test_different_seeds_differ():
    a = run_property_audit(2, 200, seed=1)
    b = run_property_audit(2, 200, seed=2)
    assert a.to_text() != b.to_text()


def test_tampered_tolerance_reports_violations():
    """Negative control: an absurd finite-difference tolerance must produce
    violations, proving the audit can actually fail."""
    tight = AuditTolerances(fd_match=1e-16)
    report = run_property_audit(2, 200, seed=3, tolerances=tight)
    assert report.total_violations > 0


def test_report_text_layout():
    report = run_property_audit(2, 100, seed=5)
    text = report.to_text()
    assert text.startswith("property audit: seed=5 polygons=2 samples=100")
    assert text.endswith("total violations: 0\n")
    assert "analytic vs FD gradient (wachspress)" in text
