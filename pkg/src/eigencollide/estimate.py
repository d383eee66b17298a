"""Monte Carlo collision probabilities and box-counting dimension.

`collision_prob` estimates P(min over the grid of the pattern gap <= eps)
over a ladder of thresholds; the theory predicts 0 or > 0 in the limit, so
the interesting statistics are the decay (Zero side) or the plateau
(Positive side) of the hit fraction as eps shrinks.  Hit fractions carry
Wilson 95% intervals, which behave in the small-probability regime where
Wald intervals collapse.

`box_dim` estimates the Hausdorff dimension of the collision-time set of a
single path by box counting with a value threshold coupled to the box
size: a grid point is marked when its gap is at most kappa * delta^H with
H the largest (smoothest-direction) regularity exponent.  The field moves
about delta^H across a box of side delta, so a fixed threshold would
overestimate the dimension.  Box counting is a numerical proxy for the
covering dimension; no capacity lower bound is attempted.

Paths are independent across workers and the reduction is ordered by path
index, so results are identical for any thread count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .gfield import TimeGrid
from .matfield import EnsembleSpec, sample_ensemble
from .spectra import NumericalError, pattern_gap_values, spectral_path
from .theory import CollisionPattern, SpectralKind, TheoryVerdict, Verdict, dichotomy

__all__ = [
    "CollisionProbEstimate",
    "BoxDimEstimate",
    "ExperimentReport",
    "wilson_interval",
    "collision_prob",
    "box_dim",
    "box_count_dimension",
    "verdict_experiment",
    "path_min_gap",
]

_Z95 = 1.959963984540054


def wilson_interval(hits: int, n: int, z: float = _Z95) -> tuple[float, float]:
    """Wilson 95% score interval for a binomial fraction."""
    if n <= 0:
        return (0.0, 1.0)
    p = hits / n
    denom = 1.0 + z * z / n
    center = (p + z * z / (2 * n)) / denom
    half = (z / denom) * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n))
    return (max(0.0, center - half), min(1.0, center + half))


@dataclass(frozen=True)
class CollisionProbEstimate:
    """Hit fractions over a decreasing eps ladder, with Wilson intervals."""

    eps_ladder: tuple[float, ...]
    hits: tuple[int, ...]
    fractions: tuple[float, ...]
    intervals: tuple[tuple[float, float], ...]
    n_paths: int
    n_failed: int
    seed: int

    def to_json_dict(self) -> dict:
        return {
            "eps_ladder": list(self.eps_ladder),
            "hits": list(self.hits),
            "fractions": list(self.fractions),
            "wilson_95": [list(iv) for iv in self.intervals],
            "n_paths": self.n_paths,
            "n_failed": self.n_failed,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class BoxDimEstimate:
    """log N(delta) vs log(1/delta) slope over a fit window."""

    deltas: tuple[float, ...]
    counts: tuple[int, ...]
    thresholds: tuple[float, ...]
    slope: float | None
    stderr: float | None
    window: tuple[float, ...]
    reliable: bool
    notes: tuple[str, ...]

    def to_json_dict(self) -> dict:
        return {
            "deltas": list(self.deltas),
            "counts": list(self.counts),
            "thresholds": list(self.thresholds),
            "slope": self.slope,
            "stderr": self.stderr,
            "fit_window": list(self.window),
            "reliable": self.reliable,
            "notes": list(self.notes),
        }


def path_min_gap(
    spec: EnsembleSpec,
    pattern: CollisionPattern,
    kind: SpectralKind,
    grid: TimeGrid,
    seed: int,
    path_index: int,
) -> float:
    """Smallest pattern gap over the grid for one Monte Carlo path."""
    gaps = _path_gaps(spec, pattern, kind, grid, seed, path_index)
    return float(gaps.min())


def _path_gaps(spec, pattern, kind, grid, seed, path_index) -> np.ndarray:
    mat = sample_ensemble(spec, grid, seed, path_index)
    spath = spectral_path(mat, kind)
    return pattern_gap_values(spath.values, pattern)


def collision_prob(
    spec: EnsembleSpec,
    pattern: CollisionPattern,
    kind: SpectralKind,
    grid: TimeGrid,
    eps_ladder,
    n_paths: int,
    seed: int,
    threads: int = 1,
) -> CollisionProbEstimate:
    """Hit fractions of {min gap <= eps} over `n_paths` independent paths.

    Paths on which the eigensolver fails are counted in `n_failed` and
    excluded from the fractions, never silently dropped.  Results are a
    function of (seed, config) only.
    """
    eps = tuple(float(e) for e in eps_ladder)
    if any(b >= a for a, b in zip(eps, eps[1:])):
        raise ValueError("eps ladder must be strictly decreasing")
    if n_paths < 100:
        raise ValueError("need at least 100 paths for a meaningful estimate")

    def one(p: int) -> float:
        try:
            return path_min_gap(spec, pattern, kind, grid, seed, p)
        except NumericalError:
            return math.nan

    if threads <= 1:
        mins = np.array([one(p) for p in range(n_paths)])
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            mins = np.array(list(pool.map(one, range(n_paths))))
    ok = ~np.isnan(mins)
    n_ok = int(ok.sum())
    hits = tuple(int((mins[ok] <= e).sum()) for e in eps)
    fractions = tuple(h / n_ok if n_ok else math.nan for h in hits)
    intervals = tuple(wilson_interval(h, n_ok) for h in hits)
    return CollisionProbEstimate(
        eps_ladder=eps,
        hits=hits,
        fractions=fractions,
        intervals=intervals,
        n_paths=n_paths,
        n_failed=n_paths - n_ok,
        seed=seed,
    )


def _box_count(marked: np.ndarray, grid: TimeGrid, delta: float) -> int:
    """Number of delta-boxes (physical side length) meeting the marked set."""
    flat_id = np.zeros(grid.shape, dtype=np.int64)
    stride = 1
    for j in reversed(range(grid.ndim)):
        a, b = grid.intervals[j]
        n_boxes = max(1, math.ceil((b - a) / delta - 1e-12))
        ids = np.minimum(np.floor((grid.axis(j) - a) / delta).astype(np.int64), n_boxes - 1)
        shape = [1] * grid.ndim
        shape[j] = -1
        flat_id = flat_id + ids.reshape(shape) * stride
        stride *= n_boxes
    return int(np.unique(flat_id[marked]).size)


def box_count_dimension(
    values: np.ndarray,
    grid: TimeGrid,
    delta_ladder,
    holder: float,
    kappa: float = 1.0,
    drop_coarse: int = 2,
    drop_fine: int = 1,
) -> BoxDimEstimate:
    """Box-counting slope for the near-zero set of a nonnegative field.

    Marks grid points where `values` <= kappa * delta^holder, counts
    occupied delta-boxes per ladder level, and fits the log-log slope by
    least squares.  The default window drops the two coarsest levels and
    the finest one (boundary and discretization bias).  Too few usable
    levels flag the estimate unreliable, never raise.
    """
    deltas = tuple(sorted((float(d) for d in delta_ladder), reverse=True))
    if len(set(deltas)) != len(deltas):
        raise ValueError("delta ladder must not contain repeats")
    vals = np.asarray(values, dtype=float)
    if vals.shape != grid.shape:
        raise ValueError("values must be grid-shaped")
    notes = []
    counts = []
    thresholds = []
    for delta in deltas:
        thr = kappa * delta**holder
        thresholds.append(thr)
        counts.append(_box_count(vals <= thr, grid, delta))

    lo = drop_coarse
    hi = len(deltas) - drop_fine
    window = [
        (d, c) for d, c in zip(deltas[lo:hi], counts[lo:hi]) if c > 0
    ]
    if len(window) < 3:
        notes.append("fewer than 3 usable levels in the fit window")
    if sum(1 for _, c in window if c >= 10) < 3:
        notes.append("fewer than 3 levels with at least 10 occupied boxes")
    slope = stderr = None
    if len(window) >= 2:
        x = np.log(1.0 / np.array([d for d, _ in window]))
        y = np.log(np.array([c for _, c in window], dtype=float))
        slope_, intercept = np.polyfit(x, y, 1)
        resid = y - (slope_ * x + intercept)
        sxx = ((x - x.mean()) ** 2).sum()
        dof = len(x) - 2
        stderr = float(np.sqrt(resid @ resid / dof / sxx)) if dof > 0 else None
        slope = float(slope_)
    else:
        notes.append("not enough occupied levels to fit a slope")
    return BoxDimEstimate(
        deltas=deltas,
        counts=tuple(counts),
        thresholds=tuple(thresholds),
        slope=slope,
        stderr=stderr,
        window=tuple(d for d, _ in window),
        reliable=not notes,
        notes=tuple(notes),
    )


def box_dim(
    spec: EnsembleSpec,
    pattern: CollisionPattern,
    kind: SpectralKind,
    grid: TimeGrid,
    seed: int,
    delta_ladder,
    kappa: float = 1.0,
    path_index: int = 0,
) -> BoxDimEstimate:
    """Box-counting dimension of the collision-time set on a single path.

    Anisotropic exponent vectors with H_N / H_1 > 2 are refused: isotropic
    boxes would then need axis-specific scaling the estimator does not do.
    """
    hs = spec.kernel.hurst.as_floats()
    if max(hs) / min(hs) > 2.0:
        raise ValueError(
            "anisotropy H_N/H_1 > 2 is unsupported by isotropic box counting"
        )
    gaps = _path_gaps(spec, pattern, kind, grid, seed, path_index)
    return box_count_dimension(gaps, grid, delta_ladder, holder=max(hs), kappa=kappa)


@dataclass(frozen=True)
class ExperimentReport:
    """Theory verdict next to its Monte Carlo and box-dimension checks."""

    theory: TheoryVerdict
    mc: CollisionProbEstimate
    boxdim: BoxDimEstimate | None
    mc_behavior: str  # consistent-with-zero | consistent-with-positive | inconclusive
    agree: bool

    def to_json_dict(self) -> dict:
        return {
            "theory": self.theory.to_json_dict(),
            "mc": self.mc.to_json_dict(),
            "boxdim": None if self.boxdim is None else self.boxdim.to_json_dict(),
            "mc_behavior": self.mc_behavior,
            "agree": self.agree,
        }


def classify_mc(est: CollisionProbEstimate) -> str:
    """Decay vs plateau of the hit fraction along the eps ladder.

    Zero side: every rung at most half the previous one.  Positive side:
    the two smallest-eps fractions overlap at 95% and both exceed 0.05.
    The extrapolation to eps -> 0 is heuristic by nature.
    """
    f = est.fractions
    if len(f) >= 2 and all(b <= a / 2 for a, b in zip(f, f[1:])):
        return "consistent-with-zero"
    if len(f) >= 2:
        (lo1, hi1), (lo2, hi2) = est.intervals[-2], est.intervals[-1]
        overlap = max(lo1, lo2) <= min(hi1, hi2)
        if overlap and f[-1] > 0.05 and f[-2] > 0.05:
            return "consistent-with-positive"
    return "inconclusive"


def verdict_experiment(
    spec: EnsembleSpec,
    pattern: CollisionPattern,
    kind: SpectralKind,
    grid: TimeGrid,
    n_paths: int,
    seed: int,
    eps_ladder,
    delta_ladder=None,
    kappa: float = 1.0,
    threads: int = 1,
) -> ExperimentReport:
    """Bundle the exact prediction with both estimators and agreement flags."""
    theory = dichotomy(spec.kernel.hurst, kind, pattern)
    mc = collision_prob(spec, pattern, kind, grid, eps_ladder, n_paths, seed, threads)
    boxdim = None
    if delta_ladder is not None:
        boxdim = box_dim(spec, pattern, kind, grid, seed, delta_ladder, kappa)
    behavior = classify_mc(mc)
    expected = (
        "consistent-with-zero"
        if theory.verdict is Verdict.ZERO
        else "consistent-with-positive"
    )
    return ExperimentReport(
        theory=theory,
        mc=mc,
        boxdim=boxdim,
        mc_behavior=behavior,
        agree=behavior == expected,
    )
