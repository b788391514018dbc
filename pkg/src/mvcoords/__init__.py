"""Barycentric coordinates on convex polygons and a polygonal FEM pipeline."""

from .audit import (
    AuditTolerances,
    PropertyAuditReport,
    random_convex_polygon,
    run_property_audit,
    sample_interior,
)
from .coords import (
    BasisEval,
    ScanResult,
    fd_gradient,
    mvc_gradients,
    mvc_values,
    mvc_weights,
    sup_gradient_scan,
    wachspress_gradients,
    wachspress_values,
)
from .errors import (
    CollinearVertices,
    DegenerateDenominator,
    DegenerateEdge,
    EvaluationError,
    NoConvergence,
    NonConvex,
    OutsidePolygon,
    PointTooCloseToBoundary,
    PolygonError,
    StepTooLarge,
    UnsupportedDegree,
    WrongOrientation,
)
from .fem import (
    ConvergenceReport,
    LinearSystem,
    Mesh,
    assemble,
    build_mesh,
    convergence_study,
    save_mesh,
    solution_errors,
    solve,
)
from .geometry import (
    GeometricConstants,
    Polygon,
    SimilarityTransform,
    apex_pentagon,
    ball_edge_intersections,
    compute_hstar,
    geometric_constants,
    load_polygon,
    min_vertex_distance,
    normalize_to_unit_diameter,
    point_geometry,
    polygon_from_json,
    polygon_to_json,
    polygon_validate,
    save_polygon,
)
from .interp import (
    QuadratureRule,
    ScalarField,
    error_norms,
    estimate_ratio,
    fan_quadrature,
    field_linear,
    field_sin_exp,
    field_x2,
    field_xy,
    field_y2,
    h2_seminorm,
    interpolate,
    standard_fields,
    triangle_rule,
)

__version__ = "0.1.0"
