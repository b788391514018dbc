"""Poisson convergence study on meshes of degenerate octagons.

-Laplace(u) = f on the unit square, u = g on the boundary, with the
manufactured solution u = sin(x) e^y (harmonic, so f = 0). Each element
is a square cell plus its four edge midpoints, treated as an octagon
with interior angles alternating between 90 and 180 degrees, and the
basis on it is the mean value coordinates of its eight nodes. Expected
rates for this linear-precision basis: 2 in L2, 1 in H1.
"""

from mvcoords import convergence_study


def main():
    report = convergence_study([2, 4, 8, 16, 32])
    print(report.to_markdown())
    print("last L2 rate:", f"{report.l2_rates[-1]:.3f}")
    print("last H1 rate:", f"{report.h1_rates[-1]:.3f}")


if __name__ == "__main__":
    main()
