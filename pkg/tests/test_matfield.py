"""Matrix-field assembly statistics and affine-map properties."""

import numpy as np
import pytest

from eigencollide.gfield import KernelSpec, TimeGrid
from eigencollide.matfield import (
    EnsembleSpec,
    affine,
    affine_inverse,
    assemble_rect,
    assemble_selfadjoint,
    sample_ensemble,
)
from eigencollide.theory import HurstVector

KERN = KernelSpec(HurstVector(["1/2"]))
GRID = TimeGrid.unit([2])  # t = 1 is grid point 0; C(1,1) = 1


def draws_selfadjoint(beta, d, m, seed=5):
    spec = EnsembleSpec(beta=beta, shape=(d,), kernel=KERN)
    return np.stack(
        [assemble_selfadjoint(spec, GRID, seed, path_index=i).values[0] for i in range(m)]
    )


# -- spec validation ----------------------------------------------------


def test_spec_validation():
    with pytest.raises(ValueError):
        EnsembleSpec(beta=3, shape=(2,), kernel=KERN)
    with pytest.raises(ValueError):
        EnsembleSpec(beta=1, shape=(3, 2), kernel=KERN)  # d1 > d2
    with pytest.raises(ValueError):
        EnsembleSpec(beta=1, shape=(2,), kernel=KERN, shift=np.array([[0.0, 1], [0, 0]]))
    with pytest.raises(ValueError):
        EnsembleSpec(
            beta=1, shape=(2,), kernel=KERN, transform=np.array([[1.0, 0], [0, 0]])
        )
    with pytest.raises(ValueError):
        EnsembleSpec(
            beta=1, shape=(2,), kernel=KERN, transform=np.array([[1.0, 1j], [-1j, 1]])
        )


def test_near_singular_transform_rejected():
    t = np.diag([1.0, 1e-12])
    with pytest.raises(ValueError):
        EnsembleSpec(beta=1, shape=(2,), kernel=KERN, transform=t)


# -- entry statistics ---------------------------------------------------


def test_goe_entry_variances():
    m = 10_000
    x = draws_selfadjoint(1, 2, m)
    se = np.sqrt(2.0 / m)
    assert abs(x[:, 0, 0].var() - 2.0) <= 3 * 2.0 * se
    assert abs(x[:, 0, 1].var() - 1.0) <= 3 * 1.0 * se
    assert np.array_equal(x[:, 0, 1], x[:, 1, 0])


def test_gue_entry_variances():
    m = 10_000
    x = draws_selfadjoint(2, 2, m)
    se = np.sqrt(2.0 / m)
    assert np.all(x[:, 0, 0].imag == 0)
    assert np.all(x[:, 1, 1].imag == 0)
    assert abs(x[:, 0, 0].real.var() - 2.0) <= 3 * 2.0 * se
    assert abs(x[:, 0, 1].real.var() - 1.0) <= 3 * se
    assert abs(x[:, 0, 1].imag.var() - 1.0) <= 3 * se


def test_selfadjoint_exact():
    spec = EnsembleSpec(beta=2, shape=(3,), kernel=KERN)
    p = assemble_selfadjoint(spec, TimeGrid.unit([3]), seed=1)
    assert np.array_equal(p.values, np.conj(p.values.swapaxes(-1, -2)))


def test_entry_fields_independent():
    m = 10_000
    x = draws_selfadjoint(1, 2, m, seed=6)
    pairs = [((0, 0), (0, 1)), ((0, 0), (1, 1)), ((0, 1), (1, 1))]
    for (i1, j1), (i2, j2) in pairs:
        rho = np.corrcoef(x[:, i1, j1], x[:, i2, j2])[0, 1]
        assert abs(rho) < 4 / np.sqrt(m)


def test_rect_entry_variances():
    m = 8000
    spec = EnsembleSpec(beta=1, shape=(2, 3), kernel=KERN)
    w = np.stack(
        [assemble_rect(spec, GRID, 7, path_index=i).values[0] for i in range(m)]
    )
    se = np.sqrt(2.0 / m)
    for i in range(2):
        for j in range(3):
            assert abs(w[:, i, j].var() - 1.0) <= 3 * se
    spec2 = EnsembleSpec(beta=2, shape=(2, 3), kernel=KERN)
    z = np.stack(
        [assemble_rect(spec2, GRID, 8, path_index=i).values[0] for i in range(m)]
    )
    assert abs(z[:, 0, 0].real.var() - 1.0) <= 3 * se
    assert abs(z[:, 0, 0].imag.var() - 1.0) <= 3 * se


def test_fixed_seed_bit_identical():
    spec = EnsembleSpec(beta=2, shape=(2, 3), kernel=KERN)
    a = assemble_rect(spec, GRID, 9, path_index=3)
    b = assemble_rect(spec, GRID, 9, path_index=3)
    assert np.array_equal(a.values, b.values)


# -- affine maps --------------------------------------------------------


def test_affine_identity_is_bitwise():
    spec = EnsembleSpec(beta=1, shape=(2,), kernel=KERN)
    raw = assemble_selfadjoint(spec, GRID, seed=2)
    out = affine(raw, spec)
    assert np.array_equal(out.values, raw.values)


def test_affine_norm_bound():
    # |A + T X T*|_F <= 4 (|A|_F + |X|_F) for T = diag(1, 2)
    spec = EnsembleSpec(
        beta=1,
        shape=(2,),
        kernel=KERN,
        shift=np.diag([1.0, -2.0]),
        transform=np.diag([1.0, 2.0]),
    )
    raw = assemble_selfadjoint(spec, GRID, seed=3)
    out = affine(raw, spec)
    lhs = np.linalg.norm(out.values, axis=(-2, -1))
    rhs = 4 * (np.linalg.norm(spec.shift) + np.linalg.norm(raw.values, axis=(-2, -1)))
    assert np.all(lhs <= rhs)


def test_affine_bijection():
    rng = np.random.default_rng(0)
    t = rng.standard_normal((2, 2)) + np.eye(2) * 2
    spec = EnsembleSpec(
        beta=1, shape=(2,), kernel=KERN, shift=np.diag([0.5, 0.5]), transform=t
    )
    raw = assemble_selfadjoint(spec, GRID, seed=4)
    back = affine_inverse(affine(raw, spec), spec)
    rel = np.linalg.norm(back.values - raw.values) / np.linalg.norm(raw.values)
    assert rel < 1e-12


def test_affine_rect_bijection():
    rng = np.random.default_rng(1)
    t = rng.standard_normal((2, 2)) + 2 * np.eye(2)
    tr = rng.standard_normal((3, 3)) + 2 * np.eye(3)
    spec = EnsembleSpec(
        beta=2,
        shape=(2, 3),
        kernel=KERN,
        shift=(rng.standard_normal((2, 3)) + 1j * rng.standard_normal((2, 3))),
        transform=t.astype(complex),
        transform_right=tr.astype(complex),
    )
    raw = assemble_rect(spec, GRID, seed=5)
    back = affine_inverse(affine(raw, spec), spec)
    rel = np.linalg.norm(back.values - raw.values) / np.linalg.norm(raw.values)
    assert rel < 1e-12


def test_affine_result_selfadjoint():
    rng = np.random.default_rng(2)
    t = rng.standard_normal((3, 3)) + 3 * np.eye(3)
    spec = EnsembleSpec(beta=1, shape=(3,), kernel=KERN, transform=t)
    out = sample_ensemble(spec, GRID, seed=6)
    assert np.array_equal(out.values, out.values.swapaxes(-1, -2))


def test_real_case_stays_real():
    spec = EnsembleSpec(beta=1, shape=(2,), kernel=KERN)
    p = sample_ensemble(spec, GRID, seed=7)
    assert p.values.dtype == np.float64
