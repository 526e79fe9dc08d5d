"""Subspace basics: projections, reflections, intersections, Friedrichs angle.

Run with:  python demos/01_subspaces_and_angles.py
"""

import numpy as np

from circumsolve import (
    AffineSubspace,
    LinearSubspace,
    friedrichs_cosine,
    intersect,
    orthogonal_complement,
    orthonormal_basis,
)

# ---------------------------------------------------------------------------
# Build subspaces from spanning vectors.  Dependent vectors are dropped by a
# rank-revealing orthogonalization, so the basis is always orthonormal.
# ---------------------------------------------------------------------------
L = orthonormal_basis([(1, 1, 0), (1, 0, 1), (0, 1, -1)])
print("span of three dependent vectors has dimension", L.dim)

plane = LinearSubspace.span([(1, 0, 0), (0, 1, 0)])
x = np.array([1.0, 2.0, 3.0])
print("projection of", x, "onto the xy-plane:", plane.project(x))
print("reflection through the plane:       ", plane.reflect(x))

# An affine subspace is an anchor plus a direction; the anchor is stored as
# the minimum-norm point of the set.
line = AffineSubspace((5.0, 1.0), LinearSubspace.span([(1, 0)]))
print("canonical anchor of the line y=1:", line.anchor)

# ---------------------------------------------------------------------------
# Intersections.  Parallel lines are disjoint, which is reported as None.
# ---------------------------------------------------------------------------
a = AffineSubspace((0, 0), LinearSubspace.span([(1, 0)]))
b = AffineSubspace((0, 1), LinearSubspace.span([(1, 1)]))
meet = intersect(a, b)
print("x-axis meets the line y=x+1 at", meet.anchor)

parallel = intersect(a, AffineSubspace((0, 1), LinearSubspace.span([(1, 0)])))
print("x-axis meets the line y=1:", parallel)

# ---------------------------------------------------------------------------
# The Friedrichs angle controls how fast projection methods converge.  It is
# the smallest principal angle AFTER removing the intersection; for two
# planes sharing a line it can be much smaller than 90 degrees even though
# they share directions.
# ---------------------------------------------------------------------------
theta = np.pi / 6
U = LinearSubspace.span([(1, 0, 0), (0, 1, 0)])
V = LinearSubspace.span([(0, 1, 0), (np.cos(theta), 0, np.sin(theta))])
cf = friedrichs_cosine(U, V)
print(f"two planes sharing the y-axis, tilted by 30 degrees: cF = {cf:.6f}")
print(f"(cos 30deg = {np.cos(theta):.6f})")

C = orthogonal_complement(U)
print("complement of the xy-plane is spanned by", C.basis)
