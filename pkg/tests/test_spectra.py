"""Eigensolver and pattern-gap checks against independent oracles."""

from itertools import combinations

import numpy as np
import pytest

from eigencollide.gfield import KernelSpec, TimeGrid
from eigencollide.matfield import EnsembleSpec, sample_ensemble
from eigencollide.spectra import (
    eigvals_selfadjoint,
    pattern_gap,
    pattern_gap_values,
    singvals,
    spectral_path,
)
from eigencollide.theory import CollisionPattern, HurstVector, SpectralKind


def charpoly_roots(m):
    """Eigenvalues via the characteristic polynomial.

    Coefficients come from the Faddeev-LeVerrier trace recursion and the
    roots from the companion matrix, so nothing here shares code with the
    rotation-based solver under test.
    """
    d = m.shape[0]
    coeffs = [1.0]
    a = np.array(m, dtype=complex)
    ak = np.eye(d, dtype=complex)
    for k in range(1, d + 1):
        ak = a @ ak
        c = -np.trace(ak) / k
        ak += c * np.eye(d)
        coeffs.append(c.real)
    return np.sort(np.roots(coeffs).real)


def rand_sym(rng, d, complex_=False):
    a = rng.standard_normal((d, d))
    if complex_:
        a = a + 1j * rng.standard_normal((d, d))
    return a + np.conj(a.T)


# -- eigensolver --------------------------------------------------------


def test_eigvals_fixed_examples():
    assert np.allclose(eigvals_selfadjoint(np.diag([3.0, 1.0, 2.0])), [1, 2, 3])
    assert np.allclose(eigvals_selfadjoint(np.array([[0.0, 1.0], [1.0, 0.0]])), [-1, 1])


def test_eigvals_against_charpoly_oracle():
    rng = np.random.default_rng(42)
    for _ in range(30):
        m = rand_sym(rng, 5)
        assert np.abs(eigvals_selfadjoint(m) - charpoly_roots(m)).max() < 1e-8


def test_eigvals_complex_against_charpoly_oracle():
    rng = np.random.default_rng(43)
    for _ in range(20):
        m = rand_sym(rng, 4, complex_=True)
        assert np.abs(eigvals_selfadjoint(m) - charpoly_roots(m)).max() < 1e-8


def test_eigvals_batched_matches_single():
    rng = np.random.default_rng(44)
    mats = np.stack([rand_sym(rng, 3) for _ in range(50)])
    batched = eigvals_selfadjoint(mats)
    for k in range(50):
        assert np.allclose(batched[k], eigvals_selfadjoint(mats[k]))


def test_weyl_stability():
    rng = np.random.default_rng(45)
    for _ in range(40):
        d = rng.integers(2, 7)
        a = rand_sym(rng, d)
        b = a + 0.1 * rand_sym(rng, d)
        wa, wb = eigvals_selfadjoint(a), eigvals_selfadjoint(b)
        assert np.abs(wa - wb).max() <= np.linalg.norm(a - b) + 1e-12


def test_eigvals_rejects_oversize():
    with pytest.raises(ValueError):
        eigvals_selfadjoint(np.eye(65))


# -- singular values ----------------------------------------------------


def test_singvals_fixed_examples():
    assert np.allclose(singvals(np.array([[1.0, 0, 0], [0, 2.0, 0]])), [1, 2])
    assert np.allclose(singvals(np.zeros((2, 3))), [0, 0])


def test_singvals_both_gram_forms_agree():
    rng = np.random.default_rng(46)
    for _ in range(20):
        m = rng.standard_normal((3, 5))
        sv = singvals(m)
        w = np.sort(eigvals_selfadjoint(m.T @ m))  # larger Gram form
        nontrivial = np.sqrt(np.clip(w[-3:], 0, None))
        assert np.abs(sv - nontrivial).max() < 1e-8


def test_singvals_requires_wide():
    with pytest.raises(ValueError):
        singvals(np.zeros((3, 2)))


# -- pattern gap --------------------------------------------------------


def brute_force_gap(lam, mult):
    """Min over all disjoint index sets (any order, not just contiguous)."""
    best = np.inf

    def rec(avail, idx, cur):
        nonlocal best
        if cur >= best:
            return
        if idx == len(mult):
            best = min(best, cur)
            return
        for js in combinations(sorted(avail), mult[idx]):
            span = lam[js[-1]] - lam[js[0]]
            rec(avail - set(js), idx + 1, max(cur, span))

    rec(frozenset(range(len(lam))), 0, 0.0)
    return best


def all_patterns(n):
    out = []

    def rec(prefix, budget, low):
        for l in range(low, budget + 1):
            out.append(tuple(prefix + [l]))
            rec(prefix + [l], budget - l, l)

    rec([], n, 2)
    return out


def test_pattern_gap_examples():
    lam = np.array([0.0, 0.1, 0.15, 0.9])
    g = pattern_gap(lam, CollisionPattern((2,), 4))
    assert g.value == pytest.approx(0.05)
    assert g.witness == ((1, 2),)
    g = pattern_gap(lam, CollisionPattern((2, 2), 4))
    assert g.value == pytest.approx(0.75)
    assert g.witness == ((0, 1), (2, 3))
    g = pattern_gap(np.array([3.0, 3.0, 3.0]), CollisionPattern((3,), 3))
    assert g.value == 0.0


def test_pattern_gap_matches_brute_force():
    rng = np.random.default_rng(47)
    for _ in range(200):
        n = int(rng.integers(2, 9))
        lam = np.sort(rng.standard_normal(n))
        if rng.random() < 0.3:  # inject exact ties
            i, j = rng.integers(0, n, size=2)
            lam[i] = lam[j]
            lam = np.sort(lam)
        for mult in all_patterns(n):
            p = CollisionPattern(mult, n)
            want = brute_force_gap(lam, mult)
            assert pattern_gap(lam, p).value == pytest.approx(want, abs=1e-12)
            got = pattern_gap_values(lam[None, :], p)[0]
            assert got == pytest.approx(want, abs=1e-12)


def test_pattern_gap_witness_blocks_are_disjoint_and_sized():
    rng = np.random.default_rng(48)
    for _ in range(50):
        n = int(rng.integers(4, 9))
        lam = np.sort(rng.standard_normal(n))
        for mult in all_patterns(n):
            g = pattern_gap(lam, CollisionPattern(mult, n))
            seen = set()
            for block, l in zip(g.witness, mult):
                assert len(block) == l
                assert not seen & set(block)
                seen |= set(block)
            spans = [lam[b[-1]] - lam[b[0]] for b in g.witness]
            assert max(spans) == pytest.approx(g.value, abs=1e-12)


def test_pattern_gap_translation_invariance():
    # Exact invariance on dyadic values, where float addition is exact.
    rng = np.random.default_rng(49)
    lam = np.sort(rng.integers(-64, 64, size=6)) / 64.0
    p = CollisionPattern((2, 3), 6)
    base = pattern_gap(lam, p).value
    for c in (-5.0, 0.25, 12.5):
        assert pattern_gap(np.sort(lam + c), p).value == base
    # and to rounding accuracy for generic values
    lam = np.sort(rng.standard_normal(6))
    base = pattern_gap(lam, p).value
    for c in (-3.7, 0.1):
        assert pattern_gap(np.sort(lam + c), p).value == pytest.approx(base, abs=1e-12)


def test_pattern_gap_lipschitz():
    rng = np.random.default_rng(50)
    p = CollisionPattern((2, 2), 7)
    for _ in range(100):
        lam = np.sort(rng.standard_normal(7))
        eps = 10.0 ** rng.uniform(-6, -1)
        lam2 = np.sort(lam + rng.uniform(-eps, eps, size=7))
        a, b = pattern_gap(lam, p).value, pattern_gap(lam2, p).value
        assert abs(a - b) <= 2 * np.abs(np.sort(lam2) - lam).max() + 1e-12


def test_pattern_gap_monotone_in_blocks():
    rng = np.random.default_rng(51)
    for _ in range(50):
        lam = np.sort(rng.standard_normal(8))
        base = pattern_gap(lam, CollisionPattern((2,), 8)).value
        more = pattern_gap(lam, CollisionPattern((2, 2), 8)).value
        even_more = pattern_gap(lam, CollisionPattern((2, 2, 2), 8)).value
        assert base <= more <= even_more


def test_pattern_gap_requires_sorted():
    with pytest.raises(ValueError):
        pattern_gap(np.array([1.0, 0.5]), CollisionPattern((2,), 2))


# -- spectral paths -----------------------------------------------------


def _tiny_ensemble(beta, shape):
    return EnsembleSpec(
        beta=beta, shape=shape, kernel=KernelSpec(HurstVector(["1/2"]))
    )


def test_spectral_path_constant_matrix():
    grid = TimeGrid.unit([4])
    vals = np.tile(np.diag([1.0, 2.0]), (4, 1, 1))

    class Dummy:
        pass

    path = Dummy()
    path.grid = grid
    path.values = vals
    sp = spectral_path(path, SpectralKind.REAL_EIGEN)
    assert np.allclose(sp.values, [1.0, 2.0])


def test_spectral_path_shift_equivariance():
    grid = TimeGrid.unit([8])
    spec = _tiny_ensemble(1, (2,))
    raw = sample_ensemble(spec, grid, seed=4)
    shifted = EnsembleSpec(
        beta=1,
        shape=(2,),
        kernel=spec.kernel,
        shift=np.diag([5.0, 5.0]),
    )
    from eigencollide.matfield import affine

    sp0 = spectral_path(raw, SpectralKind.REAL_EIGEN)
    sp5 = spectral_path(affine(raw, shifted), SpectralKind.REAL_EIGEN)
    assert np.abs(sp5.values - sp0.values - 5.0).max() < 1e-10


def test_spectral_path_singular_vs_gram():
    grid = TimeGrid.unit([6])
    spec = _tiny_ensemble(2, (2, 3))
    z = sample_ensemble(spec, grid, seed=12)
    sv = spectral_path(z, SpectralKind.COMPLEX_SINGULAR).values
    gram = z.values @ np.conj(z.values.swapaxes(-1, -2))
    lam = eigvals_selfadjoint(gram)
    assert np.abs(sv**2 - lam).max() < 1e-8


def test_spectral_path_sorted_invariant():
    grid = TimeGrid.unit([5, 5])
    spec = _tiny_ensemble(1, (3,))
    kern2 = KernelSpec(HurstVector(["1/2", "1/2"]))
    spec = EnsembleSpec(beta=1, shape=(3,), kernel=kern2)
    sp = spectral_path(sample_ensemble(spec, grid, seed=3), SpectralKind.REAL_EIGEN)
    assert np.all(np.diff(sp.values, axis=-1) >= 0)
