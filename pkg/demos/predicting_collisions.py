"""Tour of the exact collision predictions.

Whether several eigenvalues (or singular values) of a matrix-valued
Gaussian field can meet is decided by comparing two numbers:

    Q = sum_j 1/H_j        the regularity budget of the time parameter,
    c = codimension        the size deficit of the degenerate matrix set.

Collisions of the prescribed multiplicities happen with positive
probability exactly when Q > c; at Q = c they still never happen.  When
they do happen, the set of collision times has an exact Hausdorff
dimension, computed below in rational arithmetic.
"""

from fractions import Fraction

from eigencollide import (
    CollisionPattern,
    DegenerateSpace,
    HurstVector,
    SpectralKind,
    dichotomy,
    lie_group_dims,
    manifold_dim,
)

pair = CollisionPattern((2,), 2)

print("=== the classical dichotomies, one time dimension (H = 1/2) ===")
for kind in SpectralKind:
    v = dichotomy(HurstVector(["1/2"]), kind, pair)
    print(
        "%-17s Q=%s  c=%s  ->  %s"
        % (kind.value, v.Q, v.codim, v.verdict.value)
    )
# All four are Zero: matrix Brownian motion never collides, which is why
# the eigenvalue SDEs stay well defined for all time.

print()
print("=== two time dimensions: the Brownian sheet collides ===")
for kind in (SpectralKind.REAL_EIGEN, SpectralKind.COMPLEX_EIGEN):
    v = dichotomy(HurstVector(["1/2", "1/2"]), kind, pair)
    print(
        "%-17s Q=%s > c=%s  ->  %s, dim of collision times = %s"
        % (kind.value, v.Q, v.codim, v.verdict.value, v.dim)
    )
# The real sheet's collision set is a curve (dimension 1); the complex
# one pays a higher codimension and only keeps dimension 1/2.

print()
print("=== anisotropy: the minimum in the dimension formula moves ===")
H = HurstVector([Fraction(1, 3), Fraction(1, 2)])
v = dichotomy(H, SpectralKind.REAL_EIGEN, pair)
print("H = (1/3, 1/2):  dim = %s, attained at ell0 = %d" % (v.dim, v.ell0))

print()
print("=== triple collisions need a bigger budget ===")
for n_axes in (2, 3, 4, 5):
    H = HurstVector(["1/2"] * n_axes)
    v = dichotomy(H, SpectralKind.REAL_EIGEN, CollisionPattern((3,), 3))
    dim = "dim %s" % v.dim if v.dim is not None else "a.s. no triple collision"
    print("N = %d:  Q = %s vs c = %s  ->  %s" % (n_axes, v.Q, v.codim, dim))

print()
print("=== where the codimension comes from ===")
# The degenerate set of symmetric matrices with a repeated pair is a
# manifold; its dimension plus the codimension is the ambient dimension.
for d in (2, 3, 5):
    p = CollisionPattern((2,), d)
    m = manifold_dim(DegenerateSpace.SYM_DEGENERATE, d, p)
    print(
        "sym d=%d: ambient %d = manifold %d + codim %d"
        % (d, d * (d + 1) // 2, m, d * (d + 1) // 2 - m)
    )

# The eigenvector frames live on a quotient of the orthogonal group by
# the block stabilizer of the repeated eigenvalues.
print()
for d in (3, 4):
    g = lie_group_dims(d, CollisionPattern((2,), d), orthogonal=True)
    print(
        "O(%d): group %d, block stabilizer %d, frame manifold %d"
        % (d, g.group, g.subgroup, g.quotient)
    )
