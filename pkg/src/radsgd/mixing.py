"""Mixing matrices for consensus under random link failures.

Four matrix roles appear here, all plain float arrays:

* base: W = I - eps * L, symmetric and doubly stochastic;
* masked: W with the weights of failed links zeroed for one slot;
* compensated: masked with each failed incoming weight returned to the
  diagonal, restoring row-stochasticity (generally not symmetric);
* expected: the entrywise expectation of the compensated matrix under the
  access policy, in closed form.

The spectral radius of (expected - ones/n) measures the per-slot
contraction of disagreement and is the quantity minimized over the access
probability.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionError, DomainError
from .linalg import spectral_radius, subtract_uniform_projector
from .mac import AccessPolicy, golden_section_max, success_probability_matrix
from .topology import Graph, laplacian


def default_epsilon(g: Graph) -> float:
    """Default base weight 1/(d_max + 1); strictly inside the (0, 1/d_max) bound."""
    return 1.0 / (float(g.degrees.max()) + 1.0)


def base_weight_matrix(g: Graph, epsilon: float) -> np.ndarray:
    """Base mixing matrix W = I - eps * L.

    Symmetric and doubly stochastic, with eps on every edge and
    1 - eps * d_i on the diagonal. The bound eps < 1/d_max is strict so all
    diagonal entries stay positive.
    """
    d_max = float(g.degrees.max())
    if not 0.0 < epsilon < 1.0 / d_max:
        raise DomainError(
            f"epsilon must lie in (0, 1/{int(d_max)}) for this graph, got {epsilon}"
        )
    return np.eye(g.n) - epsilon * laplacian(g)


def _check_same_shape(a: np.ndarray, b: np.ndarray):
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch: {a.shape} vs {b.shape}")


def mask_by_transmission(w: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Hadamard product of the base matrix with one slot's success indicators.

    Failed links lose their weight entirely; the result is generally
    neither row- nor column-stochastic until compensated.
    """
    w = np.asarray(w, dtype=float)
    t = np.asarray(t)
    _check_same_shape(w, t)
    return w * t


def compensate(w_masked: np.ndarray) -> np.ndarray:
    """Biased compensation: failed incoming weight returns to the diagonal.

    Off-diagonal entries are kept as masked; each diagonal entry is reset
    to 1 minus its surviving off-diagonal row sum, so every row sums to 1
    exactly. Asymmetric link outcomes make the result non-symmetric.
    """
    a = np.asarray(w_masked, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    out = a.copy()
    off_row_sums = a.sum(axis=1) - np.diag(a)
    np.fill_diagonal(out, 1.0 - off_row_sums)
    return out


def expected_weight_matrix(g: Graph, w_base: np.ndarray, policy: AccessPolicy) -> np.ndarray:
    """Entrywise expectation of the compensated matrix under the policy.

    Off-diagonal (i, j) is W_ij times the probability that receiver i
    decodes sender j; the diagonal absorbs the complement so rows sum to 1
    exactly. Row i's incoming links never succeed simultaneously, but
    expectation is linear, so the closed form needs no joint distribution.
    """
    w = np.asarray(w_base, dtype=float)
    if w.shape != (g.n, g.n):
        raise DimensionError(f"base matrix shape {w.shape} does not match n={g.n}")
    expected = w * success_probability_matrix(g, policy)
    np.fill_diagonal(expected, 0.0)
    np.fill_diagonal(expected, 1.0 - expected.sum(axis=1))
    return expected


def consensus_rate(g: Graph, epsilon: float, p: float) -> float:
    """Spectral radius of (expected compensated matrix - ones/n).

    Values near 1 mean slow consensus; p = 0 and p = 1 both give exactly 1
    because no packet is ever decoded and the expected matrix degenerates
    to the identity.
    """
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"access probability must lie in [0, 1], got {p}")
    w = base_weight_matrix(g, epsilon)
    expected = expected_weight_matrix(g, w, AccessPolicy.uniform(g.n, p))
    return spectral_radius(subtract_uniform_projector(expected))


def refine_spectral_minimum(g: Graph, epsilon: float, ps: np.ndarray, rates: np.ndarray) -> float:
    """Golden-section refinement around the best point of a precomputed scan."""
    k = int(np.argmin(rates))
    lo = float(ps[max(k - 1, 0)])
    hi = float(ps[min(k + 1, len(ps) - 1)])
    if lo == hi:
        return lo
    return golden_section_max(lambda p: -consensus_rate(g, epsilon, p), lo, hi, tol=1e-5)


def spectral_optimal_probability(g: Graph, epsilon: float, grid_step: float = 0.001) -> float:
    """Uniform access probability minimizing the consensus rate.

    Coarse grid scan over [0, 1] followed by golden-section refinement
    around the best grid point; the scan guards against eigenvalue-crossing
    kinks that could trap a purely local method.
    """
    ps = np.arange(0.0, 1.0 + grid_step / 2.0, grid_step)
    rates = np.array([consensus_rate(g, epsilon, p) for p in ps])
    return refine_spectral_minimum(g, epsilon, ps, rates)
