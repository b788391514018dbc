"""Quick randomized audit of the coordinate invariants.

Smaller than the default run (10 polygons x 2000 samples instead of
100 x 10000) so it finishes in a couple of seconds. Checks nonnegativity,
partition of unity, linear precision, gradient identities, and the
geometric threshold properties on freshly drawn shape-regular polygons.
"""

from mvcoords import run_property_audit

report = run_property_audit(n_polygons=10, samples_per_polygon=2000, seed=1)
print(report.to_text())
