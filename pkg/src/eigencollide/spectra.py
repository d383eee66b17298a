"""Ordered spectra and the distance-to-collision statistic.

The eigensolver is cyclic Jacobi with complex-capable rotations, batched
over leading axes so a whole grid of small matrices is processed at numpy
speed.  Supported regime is d <= 64; the paper-scale matrices are tiny and
Jacobi is easy to make deterministic.

`pattern_gap` measures how far an ordered spectrum is from a prescribed
multiple collision: the minimum over disjoint index blocks of the given
sizes of the largest within-block range.  Its zero set is exactly the
collision event.  On sorted data the optimal blocks are contiguous, which
the dynamic program exploits; the brute-force equivalence is defended by a
property test rather than a proof here.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product as _iproduct

import numpy as np

from .gfield import TimeGrid
from .theory import CollisionPattern, SpectralKind

__all__ = [
    "NumericalError",
    "SpectralPath",
    "GapStatistic",
    "eigvals_selfadjoint",
    "singvals",
    "pattern_gap",
    "pattern_gap_values",
    "spectral_path",
]

MAX_JACOBI_DIM = 64
_MAX_SWEEPS = 30
_OFF_TOL = 1e-12


class NumericalError(RuntimeError):
    """Linear-algebra failure; carries the offending batch indices."""

    def __init__(self, message: str, batch_indices=()):
        super().__init__(message)
        self.batch_indices = tuple(batch_indices)


@dataclass(frozen=True)
class SpectralPath:
    """Ordered eigenvalues or singular values at every grid point."""

    grid: TimeGrid
    values: np.ndarray  # grid.shape + (k,), non-decreasing along the last axis

    def __post_init__(self):
        self.values.flags.writeable = False


@dataclass(frozen=True)
class GapStatistic:
    """Min-max within-block spectral range and the blocks attaining it."""

    value: float
    witness: tuple[tuple[int, ...], ...]


def _jacobi_rotate(a, vecs, p, q):
    """One batched rotation annihilating the (p, q) entries of `a`."""
    apq = a[:, p, q]
    r = np.abs(apq)
    active = r > 0.0
    safe_r = np.where(active, r, 1.0)
    if np.iscomplexobj(a):
        phase = np.where(active, apq / safe_r, 1.0 + 0j)
    else:
        phase = np.where(apq < 0, -1.0, 1.0)
    # Overflow in tau*tau is benign: t underflows to 0 and the rotation
    # degenerates to the identity, the correct limit for a negligible apq.
    with np.errstate(over="ignore"):
        tau = (a[:, q, q].real - a[:, p, p].real) / (2.0 * safe_r)
        sign = np.where(tau < 0, -1.0, 1.0)
        t = sign / (np.abs(tau) + np.sqrt(1.0 + tau * tau))
    c = 1.0 / np.sqrt(1.0 + t * t)
    s = np.where(active, t * c, 0.0)
    c = np.where(active, c, 1.0)

    # a <- J* a J with J embedding [[c, s], [-s e^{-i phi}, c e^{-i phi}]]
    # at rows/columns (p, q).
    cphase = np.conj(phase)
    col_p = a[:, :, p].copy()
    col_q = a[:, :, q]
    a[:, :, p] = c[:, None] * col_p - (s * cphase)[:, None] * col_q
    a[:, :, q] = s[:, None] * col_p + (c * cphase)[:, None] * col_q
    row_p = a[:, p, :].copy()
    row_q = a[:, q, :]
    a[:, p, :] = c[:, None] * row_p - (s * phase)[:, None] * row_q
    a[:, q, :] = s[:, None] * row_p + (c * phase)[:, None] * row_q
    if vecs is not None:
        vcol_p = vecs[:, :, p].copy()
        vcol_q = vecs[:, :, q]
        vecs[:, :, p] = c[:, None] * vcol_p - (s * cphase)[:, None] * vcol_q
        vecs[:, :, q] = s[:, None] * vcol_p + (c * cphase)[:, None] * vcol_q


def _off_mass(a):
    d = a.shape[-1]
    sq = np.abs(a) ** 2
    sq[:, np.arange(d), np.arange(d)] = 0.0
    return np.sqrt(sq.sum(axis=(-2, -1)))


def _jacobi(mats, want_vectors=False):
    arr = np.asarray(mats)
    if arr.ndim < 2 or arr.shape[-1] != arr.shape[-2]:
        raise ValueError("expected square matrices on the trailing axes")
    d = arr.shape[-1]
    if d > MAX_JACOBI_DIM:
        raise ValueError("Jacobi solver supports d <= %d" % MAX_JACOBI_DIM)
    batch_shape = arr.shape[:-2]
    dtype = np.complex128 if np.iscomplexobj(arr) else np.float64
    a = arr.reshape(-1, d, d).astype(dtype, copy=True)
    vecs = None
    if want_vectors:
        vecs = np.zeros_like(a)
        vecs[:, np.arange(d), np.arange(d)] = 1.0

    norm = np.sqrt((np.abs(a) ** 2).sum(axis=(-2, -1)))
    threshold = _OFF_TOL * norm
    converged = _off_mass(a) <= threshold
    sweeps = 0
    while not converged.all():
        if sweeps >= _MAX_SWEEPS:
            bad = np.nonzero(~converged)[0]
            raise NumericalError(
                "Jacobi did not converge in %d sweeps for %d matrices"
                % (_MAX_SWEEPS, bad.size),
                batch_indices=bad,
            )
        for p in range(d - 1):
            for q in range(p + 1, d):
                _jacobi_rotate(a, vecs, p, q)
        sweeps += 1
        converged = _off_mass(a) <= threshold

    w = a[:, np.arange(d), np.arange(d)].real
    order = np.argsort(w, axis=-1, kind="stable")
    w = np.take_along_axis(w, order, axis=-1)
    if want_vectors:
        vecs = np.take_along_axis(vecs, order[:, None, :], axis=-1)
        return w.reshape(batch_shape + (d,)), vecs.reshape(batch_shape + (d, d))
    return w.reshape(batch_shape + (d,))


def eigvals_selfadjoint(mats) -> np.ndarray:
    """Ascending eigenvalues of self-adjoint matrices, batched.

    `mats` has shape (..., d, d), real symmetric or complex Hermitian; the
    result has shape (..., d).
    """
    return _jacobi(mats, want_vectors=False)


def singvals(mats) -> np.ndarray:
    """Ascending non-trivial singular values of (..., d1, d2) with d1 <= d2.

    Square roots of the Gram spectrum M M*, clamped at zero.
    """
    arr = np.asarray(mats)
    if arr.ndim < 2 or arr.shape[-2] > arr.shape[-1]:
        raise ValueError("expected d1 <= d2 on the trailing axes")
    gram = arr @ np.conj(arr).swapaxes(-1, -2)
    w = _jacobi(gram, want_vectors=False)
    return np.sqrt(np.clip(w, 0.0, None))


def _check_sorted(values: np.ndarray) -> None:
    if np.any(np.diff(values, axis=-1) < 0):
        raise ValueError("spectrum must be sorted ascending")


def _size_counts(pattern: CollisionPattern):
    sizes, counts = np.unique(pattern.multiplicities, return_counts=True)
    return tuple(int(s) for s in sizes), tuple(int(c) for c in counts)


def pattern_gap_values(spectra, pattern: CollisionPattern) -> np.ndarray:
    """Batched pattern-gap values (no witness) for (..., n) sorted spectra.

    Dynamic program over contiguous blocks of the sorted data; identical
    block sizes are collapsed into counts so the state space stays tiny.
    """
    arr = np.asarray(spectra, dtype=float)
    n = arr.shape[-1]
    if sum(pattern.multiplicities) > n:
        raise ValueError("pattern does not fit in a spectrum of length %d" % n)
    _check_sorted(arr)
    flat = arr.reshape(-1, n)
    nb = flat.shape[0]
    sizes, counts = _size_counts(pattern)

    # dp[state][:, i] = min over placements of the remaining blocks in
    # `state` using indices >= i of the max within-block range.
    states = sorted(
        _iproduct(*[range(c + 1) for c in counts]),
        key=lambda st: sum(s * k for s, k in zip(sizes, st)),
    )
    dp = {}
    for st in states:
        if all(k == 0 for k in st):
            dp[st] = np.zeros((nb, n + 1))
            continue
        table = np.full((nb, n + 1), np.inf)
        for i in range(n - 1, -1, -1):
            best = table[:, i + 1].copy()
            for which, (s, k) in enumerate(zip(sizes, st)):
                if k == 0 or i + s > n:
                    continue
                rest = st[:which] + (k - 1,) + st[which + 1 :]
                cand = np.maximum(flat[:, i + s - 1] - flat[:, i], dp[rest][:, i + s])
                np.minimum(best, cand, out=best)
            table[:, i] = best
        dp[st] = table
    return dp[counts][:, 0].reshape(arr.shape[:-1])


def pattern_gap(spectrum, pattern: CollisionPattern) -> GapStatistic:
    """Pattern-gap of one sorted spectrum, with the witness blocks.

    Ties are broken toward the lexicographically smallest starting indices
    and then toward the smallest block size, so reports are deterministic.
    """
    lam = np.asarray(spectrum, dtype=float)
    if lam.ndim != 1:
        raise ValueError("expected a single spectrum")
    n = lam.shape[0]
    if sum(pattern.multiplicities) > n:
        raise ValueError("pattern does not fit in a spectrum of length %d" % n)
    _check_sorted(lam)
    sizes, counts = _size_counts(pattern)
    full = counts

    @lru_cache(maxsize=None)
    def best(i: int, st: tuple) -> float:
        if all(k == 0 for k in st):
            return 0.0
        need = sum(s * k for s, k in zip(sizes, st))
        if n - i < need:
            return np.inf
        out = best(i + 1, st)
        for which, (s, k) in enumerate(zip(sizes, st)):
            if k == 0 or i + s > n:
                continue
            rest = st[:which] + (k - 1,) + st[which + 1 :]
            out = min(out, max(lam[i + s - 1] - lam[i], best(i + s, rest)))
        return out

    value = best(0, full)
    # Backtrack, preferring to place a block at the earliest index where
    # doing so still attains the optimum.
    blocks: list[tuple[int, int]] = []  # (start, size)
    i, st = 0, full
    while not all(k == 0 for k in st):
        placed = False
        for which, (s, k) in enumerate(zip(sizes, st)):
            if k == 0 or i + s > n:
                continue
            rest = st[:which] + (k - 1,) + st[which + 1 :]
            if max(lam[i + s - 1] - lam[i], best(i + s, rest)) <= value:
                blocks.append((i, s))
                i, st = i + s, rest
                placed = True
                break
        if not placed:
            i += 1

    # Hand blocks back in pattern order, matching sizes first-come.
    remaining = list(blocks)
    witness = []
    for l in pattern.multiplicities:
        for k, (start, size) in enumerate(remaining):
            if size == l:
                witness.append(tuple(range(start, start + size)))
                del remaining[k]
                break
    return GapStatistic(value=float(value), witness=tuple(witness))


def spectral_path(path, kind: SpectralKind) -> SpectralPath:
    """Ordered spectra over a whole matrix path.

    Applies the eigensolver (square kinds) or the singular-value map
    (rectangular kinds) pointwise; numerical failures are annotated with
    the grid coordinates of the offending point.
    """
    values = path.values
    if kind.singular:
        if values.shape[-2] > values.shape[-1]:
            raise ValueError("singular kind needs d1 <= d2")
        compute = singvals
    else:
        if values.shape[-2] != values.shape[-1]:
            raise ValueError("eigen kind needs square matrices")
        compute = eigvals_selfadjoint
    try:
        spec = compute(values)
    except NumericalError as err:
        where = [
            tuple(int(c) for c in np.unravel_index(b, path.grid.shape))
            for b in err.batch_indices[:4]
        ]
        raise NumericalError(
            "%s (grid coordinates %s%s)"
            % (err, where, ", ..." if len(err.batch_indices) > 4 else ""),
            batch_indices=err.batch_indices,
        ) from None
    return SpectralPath(grid=path.grid, values=spec)
