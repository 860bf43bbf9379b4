"""Dense real-matrix spectral helpers.

The mixing matrices produced elsewhere in this package are small, real, and
in general not symmetric, so their eigenvalues may come in complex conjugate
pairs. Eigenvalues are computed with LAPACK's general solver (Hessenberg
reduction followed by shifted QR iteration); only eigenvalues are exposed,
never eigenvectors.
"""

from __future__ import annotations

import numpy as np

from .errors import ConvergenceError, DimensionError

# The networks studied here have a few dozen nodes; the cap keeps the O(n^3)
# eigenvalue cost trivially bounded.
MAX_EIGEN_SIZE = 512


def _as_square(m) -> np.ndarray:
    a = np.asarray(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    if a.shape[0] < 1:
        raise DimensionError("matrix must have at least one row")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")
    return a


def eigenvalues(m) -> np.ndarray:
    """All eigenvalues of a real square matrix, with multiplicity.

    Returns a complex array of length n. For real input, complex
    eigenvalues appear in conjugate pairs. The spectrum is invariant under
    similarity transforms up to floating-point tolerance.
    """
    a = _as_square(m)
    n = a.shape[0]
    if n > MAX_EIGEN_SIZE:
        raise DimensionError(
            f"matrix size {n} exceeds the supported maximum {MAX_EIGEN_SIZE}"
        )
    try:
        vals = np.linalg.eigvals(a)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(
            f"QR iteration did not converge for a {n}x{n} matrix "
            f"(max |entry| = {np.abs(a).max():.3e}): {exc}"
        ) from exc
    return np.asarray(vals, dtype=complex)


def spectral_radius(m) -> float:
    """Largest eigenvalue modulus of a real square matrix; always >= 0."""
    return float(np.max(np.abs(eigenvalues(m))))


def subtract_uniform_projector(m) -> np.ndarray:
    """Subtract 1/n from every entry of an n x n matrix.

    For a stochastic matrix this removes the component along the all-ones
    consensus direction, so the spectral radius of the result measures the
    per-step contraction of disagreement.
    """
    a = _as_square(m)
    return a - 1.0 / a.shape[0]
