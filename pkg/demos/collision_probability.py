"""Watching the dichotomy in Monte Carlo.

The pattern gap of a spectrum is the smallest worst-case width of
disjoint blocks of the prescribed sizes; it is zero exactly at a
collision.  For each simulated path we take the minimum gap over the time
grid and ask how often it falls below a shrinking threshold ladder.

Zero side (matrix Brownian motion, one time axis): the hit fraction
collapses as the threshold shrinks -- collisions are near misses that a
finer threshold filters out.

Positive side (Brownian sheet, two time axes): the hit fraction levels
off at the actual collision probability.
"""

from eigencollide import CollisionPattern, EnsembleSpec, HurstVector, KernelSpec, SpectralKind, TimeGrid
from eigencollide.estimate import classify_mc, collision_prob, verdict_experiment

paths = 600  # enough to see the contrast; the acceptance suite runs 2000
pair = CollisionPattern((2,), 2)
kind = SpectralKind.REAL_EIGEN

print("=== Zero side: d=2 matrix BM, 4096 time points on [1, 2] ===")
spec = EnsembleSpec(beta=1, shape=(2,), kernel=KernelSpec(HurstVector(["1/2"])))
est = collision_prob(
    spec, pair, kind, TimeGrid.unit([4096]),
    eps_ladder=(0.02, 0.005, 0.00125), n_paths=paths, seed=1, threads=4,
)
for eps, frac, (lo, hi) in zip(est.eps_ladder, est.fractions, est.intervals):
    print("  eps=%-8g hit fraction %.4f   [%.4f, %.4f]" % (eps, frac, lo, hi))
print("  behavior:", classify_mc(est))

print()
print("=== Positive side: d=2 Brownian sheet, 256 x 256 grid ===")
spec2 = EnsembleSpec(beta=1, shape=(2,), kernel=KernelSpec(HurstVector(["1/2", "1/2"])))
est2 = collision_prob(
    spec2, pair, kind, TimeGrid.unit([256, 256]),
    eps_ladder=(0.4, 0.2, 0.11, 0.1), n_paths=paths, seed=2, threads=4,
)
for eps, frac, (lo, hi) in zip(est2.eps_ladder, est2.fractions, est2.intervals):
    print("  eps=%-8g hit fraction %.4f   [%.4f, %.4f]" % (eps, frac, lo, hi))
print("  behavior:", classify_mc(est2))

print()
print("=== bundled: theory verdict next to the evidence ===")
report = verdict_experiment(
    spec2, pair, kind, TimeGrid.unit([128, 128]),
    n_paths=paths, seed=3, eps_ladder=(0.6, 0.3, 0.17, 0.15), threads=4,
)
print("theory: verdict %s, dim %s" % (report.theory.verdict.value, report.theory.dim))
print("monte carlo: %s  ->  agree: %s" % (report.mc_behavior, report.agree))
