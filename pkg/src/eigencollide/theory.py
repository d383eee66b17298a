"""Exact collision dichotomies and dimension formulas.

Everything in this module is computed in exact rational arithmetic
(`fractions.Fraction`); floats only appear if the caller converts at the
presentation boundary.  The reason is the boundary case of the dichotomy:
the regularity sum Q and the codimension c can be exactly equal, and the
verdict at equality is Zero, so no rounding may be allowed to decide it.

Anisotropy exponents must therefore be given as rationals ("1/2", not
0.5000...); irrational exponents are not supported.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import NamedTuple, Sequence

__all__ = [
    "HurstVector",
    "CollisionPattern",
    "SpectralKind",
    "Verdict",
    "TheoryVerdict",
    "LieGroupDims",
    "DegenerateSpace",
    "codimension",
    "dichotomy",
    "hausdorff_dim",
    "manifold_dim",
    "lie_group_dims",
]


def _as_fraction(x) -> Fraction:
    if isinstance(x, float):
        raise TypeError(
            "regularity exponents must be exact rationals (int, Fraction or "
            "'p/q' string), got float %r" % x
        )
    return Fraction(x)


@dataclass(frozen=True)
class HurstVector:
    """Ordered anisotropy exponents 0 < H_1 <= ... <= H_N < 1."""

    values: tuple[Fraction, ...]

    def __init__(self, values: Sequence) -> None:
        vals = tuple(_as_fraction(v) for v in values)
        if len(vals) == 0:
            raise ValueError("need at least one exponent")
        if any(not (0 < v < 1) for v in vals):
            raise ValueError("exponents must lie in the open interval (0, 1)")
        if any(a > b for a, b in zip(vals, vals[1:])):
            raise ValueError("exponents must be non-decreasing")
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def __getitem__(self, i):
        return self.values[i]

    @property
    def regularity_sum(self) -> Fraction:
        """Q = sum of reciprocal exponents; the hitting-capacity budget."""
        return sum((1 / v for v in self.values), Fraction(0))

    def as_floats(self) -> tuple[float, ...]:
        return tuple(float(v) for v in self.values)


@dataclass(frozen=True)
class CollisionPattern:
    """Multiplicities (l_1, ..., l_r) of simultaneous spectral coincidences.

    `ambient` is the number of eigenvalues (d) or non-trivial singular
    values (d_1) available; the blocks must fit inside it.
    """

    multiplicities: tuple[int, ...]
    ambient: int

    def __init__(self, multiplicities: Sequence[int], ambient: int) -> None:
        mult = tuple(int(m) for m in multiplicities)
        if len(mult) == 0:
            raise ValueError("pattern needs at least one block")
        if any(m < 2 for m in mult):
            raise ValueError("every multiplicity must be >= 2")
        if sum(mult) > ambient:
            raise ValueError(
                "pattern %s does not fit: sum %d > ambient %d"
                % (mult, sum(mult), ambient)
            )
        object.__setattr__(self, "multiplicities", mult)
        object.__setattr__(self, "ambient", int(ambient))

    @property
    def r(self) -> int:
        return len(self.multiplicities)


class SpectralKind(Enum):
    """Which spectrum collides: eigenvalues or singular values, real or complex."""

    REAL_EIGEN = "real-eigen"
    COMPLEX_EIGEN = "complex-eigen"
    REAL_SINGULAR = "real-singular"
    COMPLEX_SINGULAR = "complex-singular"

    @property
    def beta(self) -> int:
        return 1 if self in (SpectralKind.REAL_EIGEN, SpectralKind.REAL_SINGULAR) else 2

    @property
    def singular(self) -> bool:
        return self in (SpectralKind.REAL_SINGULAR, SpectralKind.COMPLEX_SINGULAR)


class Verdict(Enum):
    ZERO = "zero"
    POSITIVE = "positive"


@dataclass(frozen=True)
class TheoryVerdict:
    """Outcome of the dichotomy: Q vs c, and the dimension when positive."""

    Q: Fraction
    codim: Fraction
    verdict: Verdict
    ell0: int | None = None
    dim: Fraction | None = None

    def to_json_dict(self) -> dict:
        """JSON form with rationals rendered as exact "p/q" strings."""
        return {
            "Q": _rat_str(self.Q),
            "c": _rat_str(self.codim),
            "verdict": self.verdict.value,
            "ell0": self.ell0,
            "dim": None if self.dim is None else _rat_str(self.dim),
        }


def _rat_str(x: Fraction) -> str:
    return "%d/%d" % (x.numerator, x.denominator)


def codimension(kind: SpectralKind, pattern: CollisionPattern) -> Fraction:
    """Codimension c of the degenerate matrix set for the pattern.

    This is the threshold of the dichotomy: collisions happen with positive
    probability exactly when Q = sum 1/H_j exceeds c.  Real kinds pay
    (l-1)(l+2)/2 per block, complex kinds (l-1)(l+1) per block.
    """
    ls = pattern.multiplicities
    if kind in (SpectralKind.REAL_EIGEN, SpectralKind.REAL_SINGULAR):
        return sum((Fraction((l - 1) * (l + 2), 2) for l in ls), Fraction(0))
    return sum((Fraction((l + 1) * (l - 1)) for l in ls), Fraction(0))


def _smallest_exceeding(H: HurstVector, c: Fraction) -> int | None:
    """Smallest ell with sum_{j<=ell} 1/H_j > c, or None if the total never does.

    The empty sum counts as 0, so ell ranges over 1..N.
    """
    partial = Fraction(0)
    for ell, h in enumerate(H.values, start=1):
        partial += 1 / h
        if partial > c:
            return ell
    return None


def _dim_at(H: HurstVector, c: Fraction, ell: int) -> Fraction:
    n = len(H)
    h_ell = H.values[ell - 1]
    return (
        sum((h_ell / H.values[j] for j in range(ell)), Fraction(0))
        + n
        - ell
        - h_ell * c
    )


def dichotomy(
    H: HurstVector, kind: SpectralKind, pattern: CollisionPattern
) -> TheoryVerdict:
    """Zero/Positive verdict for the multiple-collision probability.

    Equality Q = c belongs to the Zero side.  When the verdict is Positive
    the result carries ell0 and the exact collision-set dimension.
    """
    Q = H.regularity_sum
    c = codimension(kind, pattern)
    if Q <= c:
        return TheoryVerdict(Q=Q, codim=c, verdict=Verdict.ZERO)
    dim, ell0 = _hausdorff_dim_with_ell0(H, c)
    return TheoryVerdict(Q=Q, codim=c, verdict=Verdict.POSITIVE, ell0=ell0, dim=dim)


def _hausdorff_dim_with_ell0(H: HurstVector, c: Fraction) -> tuple[Fraction, int]:
    ell0 = _smallest_exceeding(H, c)
    if ell0 is None:
        raise ValueError("collision set is a.s. empty (Q <= c); no dimension")
    closed_form = _dim_at(H, c, ell0)
    # The closed form must agree with the exhaustive minimum over ell; this
    # is an identity, kept as a live check because it costs nothing.
    scan = min(_dim_at(H, c, ell) for ell in range(1, len(H) + 1))
    assert closed_form == scan, (H, c, ell0, closed_form, scan)
    return closed_form, ell0


def hausdorff_dim(
    H: HurstVector, kind: SpectralKind, pattern: CollisionPattern
) -> Fraction:
    """Exact Hausdorff dimension of the collision-time set.

    Only defined when the dichotomy is Positive; raises ValueError on the
    Zero side (the set is almost surely empty).
    """
    c = codimension(kind, pattern)
    if H.regularity_sum <= c:
        raise ValueError("collision set is a.s. empty (Q <= c); no dimension")
    dim, _ = _hausdorff_dim_with_ell0(H, c)
    return dim


class DegenerateSpace(Enum):
    """Ambient matrix space whose degenerate (collided-spectrum) subset we measure."""

    SYM_DEGENERATE = "sym"
    HERM_DEGENERATE = "herm"
    RECT_REAL_DEGENERATE = "rect-real"
    RECT_COMPLEX_DEGENERATE = "rect-complex"


def manifold_dim(
    space: DegenerateSpace,
    shape: int | tuple[int, int],
    pattern: CollisionPattern,
) -> int:
    """Dimension of the degenerate matrix manifold for the pattern.

    Square spaces take shape d, rectangular spaces (d1, d2) with d1 <= d2.
    The value always equals ambient dimension minus the dichotomy
    codimension of the matching spectral kind.
    """
    ls = pattern.multiplicities
    if space in (DegenerateSpace.SYM_DEGENERATE, DegenerateSpace.HERM_DEGENERATE):
        if not isinstance(shape, int):
            raise ValueError("square space takes an integer shape d")
        d = shape
        if sum(ls) > d:
            raise ValueError("pattern does not fit in dimension %d" % d)
        if space is DegenerateSpace.SYM_DEGENERATE:
            return d * (d + 1) // 2 - sum((l - 1) * (l + 2) for l in ls) // 2
        return d * d - sum((l + 1) * (l - 1) for l in ls)
    if isinstance(shape, int) or len(shape) != 2:
        raise ValueError("rectangular space takes a shape (d1, d2)")
    d1, d2 = shape
    if d1 > d2:
        raise ValueError("need d1 <= d2")
    if sum(ls) > d1:
        raise ValueError("pattern does not fit in d1 = %d" % d1)
    if space is DegenerateSpace.RECT_REAL_DEGENERATE:
        return d1 * d2 - sum((l - 1) * (l + 2) for l in ls) // 2
    return 2 * d1 * d2 - sum((l - 1) * (l + 1) for l in ls)


class LieGroupDims(NamedTuple):
    group: int
    subgroup: int
    quotient: int


def lie_group_dims(
    d: int, pattern: CollisionPattern, orthogonal: bool
) -> LieGroupDims:
    """Dimensions of the transformation group, its block-diagonal stabilizer,
    and the quotient manifold of spectral frames.

    Orthogonal: O(d) has dimension d(d-1)/2 and the stabilizer of an
    eigenvalue pattern contributes l(l-1)/2 per block.  Unitary: U(d) has
    dimension d^2 and the stabilizer one phase per distinct value plus
    l^2 per block, which adds up to d + sum l(l-1).
    """
    ls = pattern.multiplicities
    if sum(ls) > d:
        raise ValueError("pattern does not fit in dimension %d" % d)
    if orthogonal:
        group = d * (d - 1) // 2
        subgroup = sum(l * (l - 1) for l in ls) // 2
        return LieGroupDims(group, subgroup, group - subgroup)
    group = d * d
    subgroup = d + sum(l * (l - 1) for l in ls)
    quotient = d * (d - 1) - sum(l * (l - 1) for l in ls)
    return LieGroupDims(group, subgroup, quotient)
