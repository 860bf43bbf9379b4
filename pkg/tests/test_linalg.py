"""Frozen-value and property tests for the spectral helpers."""

import numpy as np
import pytest

from radsgd.errors import DimensionError
from radsgd.linalg import (
    MAX_EIGEN_SIZE,
    eigenvalues,
    spectral_radius,
    subtract_uniform_projector,
)


def _match_spectra(computed, expected, tol):
    """Greedy nearest-neighbor matching between two eigenvalue multisets."""
    remaining = list(computed)
    for target in expected:
        dists = [abs(z - target) for z in remaining]
        k = int(np.argmin(dists))
        assert dists[k] < tol, f"no eigenvalue within {tol} of {target}: residual {dists[k]}"
        remaining.pop(k)
    assert not remaining


def _circulant(first_row):
    first_row = np.asarray(first_row, dtype=float)
    return np.array([np.roll(first_row, i) for i in range(first_row.shape[0])])


def _det_elimination(m):
    """Determinant by Gaussian elimination with partial pivoting (oracle)."""
    a = np.array(m, dtype=float)
    n = a.shape[0]
    sign = 1.0
    det = 1.0
    for col in range(n):
        pivot = col + int(np.argmax(np.abs(a[col:, col])))
        if a[pivot, col] == 0.0:
            return 0.0
        if pivot != col:
            a[[col, pivot]] = a[[pivot, col]]
            sign = -sign
        det *= a[col, col]
        a[col + 1 :, col:] -= np.outer(a[col + 1 :, col] / a[col, col], a[col, col:])
    return sign * det


# Expected matrix of a 6-ring with epsilon = 1/3, p = 1/3: circulant with
# 4/81 on the two ring edges and 73/81 on the diagonal. Its eigenvalues are
# 1 - 2*eps*p*(1-p)^2 * (1 - cos(2 pi k / 6)), evaluated here as fractions.
RING6_EXPECTED = _circulant([73 / 81, 4 / 81, 0.0, 0.0, 0.0, 4 / 81])
RING6_EIGS = [1.0, 77 / 81, 69 / 81, 65 / 81, 69 / 81, 77 / 81]


def test_identity_eigenvalues():
    _match_spectra(eigenvalues(np.eye(3)), [1.0, 1.0, 1.0], 1e-12)


def test_symmetric_permutation_eigenvalues():
    _match_spectra(eigenvalues([[0.0, 1.0], [1.0, 0.0]]), [1.0, -1.0], 1e-12)


def test_ring6_expected_matrix_eigenvalues():
    _match_spectra(eigenvalues(RING6_EXPECTED), RING6_EIGS, 1e-10)


def test_spectral_radius_zero_matrix():
    assert spectral_radius(np.zeros((4, 4))) == 0.0


def test_spectral_radius_nilpotent():
    assert spectral_radius([[0.0, 2.0], [0.0, 0.0]]) < 1e-12


def test_spectral_radius_ring6_consensus():
    shifted = subtract_uniform_projector(RING6_EXPECTED)
    rho = spectral_radius(shifted)
    assert rho == pytest.approx(1 - 2 * (1 / 3) * (1 / 3) * (4 / 9) * (1 - np.cos(np.pi / 3)), abs=1e-12)
    assert rho == pytest.approx(77 / 81, abs=1e-12)
    # cross-check against plain power iteration on the symmetric matrix
    rng = np.random.default_rng(0)
    v = rng.standard_normal(6)
    for _ in range(500):
        v = shifted @ v
        v /= np.linalg.norm(v)
    assert np.linalg.norm(shifted @ v) == pytest.approx(rho, abs=1e-10)


def test_subtract_uniform_projector_cases():
    np.testing.assert_allclose(
        subtract_uniform_projector(np.full((3, 3), 1 / 3)), np.zeros((3, 3)), atol=1e-15
    )
    np.testing.assert_allclose(
        subtract_uniform_projector(np.eye(2)), [[0.5, -0.5], [-0.5, 0.5]], atol=1e-15
    )
    out = subtract_uniform_projector(np.eye(4))
    assert np.allclose(np.diag(out), 0.75)
    off = out[~np.eye(4, dtype=bool)]
    assert np.allclose(off, -0.25)


def test_eigenvalue_sum_matches_trace():
    rng = np.random.default_rng(42)
    for _ in range(100):
        n = int(rng.integers(1, 9))
        a = rng.standard_normal((n, n)) * rng.uniform(0.1, 10)
        trace = np.trace(a)
        assert abs(eigenvalues(a).sum() - trace) <= 1e-8 * (1 + abs(trace))


def test_eigenvalue_modulus_product_matches_determinant():
    rng = np.random.default_rng(7)
    for _ in range(100):
        n = int(rng.integers(1, 9))
        a = rng.standard_normal((n, n))
        prod = np.prod(np.abs(eigenvalues(a)))
        det = abs(_det_elimination(a))
        # relative bound with a small absolute guard for near-singular draws
        assert abs(prod - det) <= 1e-6 * (1e-9 + det)


def test_spectral_radius_transpose_invariant():
    rng = np.random.default_rng(3)
    for _ in range(20):
        a = rng.standard_normal((6, 6))
        assert abs(spectral_radius(a) - spectral_radius(a.T)) <= 1e-9


def test_circulant_matches_dft_formula():
    rng = np.random.default_rng(11)
    for n in (4, 6, 17, 32, 64):
        row = rng.standard_normal(n)
        # rows are right-rotations of the first row, so the spectrum is the
        # DFT of that row
        _match_spectra(eigenvalues(_circulant(row)), np.fft.fft(row), 1e-8)


def test_complex_eigenvalues_in_conjugate_pairs():
    rng = np.random.default_rng(5)
    for _ in range(20):
        vals = eigenvalues(rng.standard_normal((7, 7)))
        _match_spectra(vals, np.conj(vals), 1e-9)


def test_spectrum_invariant_under_similarity():
    rng = np.random.default_rng(9)
    a = rng.standard_normal((5, 5))
    s = np.eye(5) + 0.1 * rng.standard_normal((5, 5))
    transformed = s @ a @ np.linalg.inv(s)
    _match_spectra(eigenvalues(transformed), eigenvalues(a), 1e-7)


def test_rejects_non_square():
    with pytest.raises(DimensionError):
        eigenvalues(np.zeros((2, 3)))


def test_rejects_empty():
    with pytest.raises(DimensionError):
        eigenvalues(np.zeros((0, 0)))


def test_rejects_oversized():
    n = MAX_EIGEN_SIZE + 1
    with pytest.raises(DimensionError):
        eigenvalues(np.eye(n))


def test_rejects_non_finite():
    with pytest.raises(ValueError):
        eigenvalues([[np.nan, 0.0], [0.0, 1.0]])


def test_subtract_uniform_projector_rejects_non_square():
    with pytest.raises(DimensionError):
        subtract_uniform_projector(np.zeros((3, 2)))
