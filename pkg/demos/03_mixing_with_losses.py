"""How the mixing matrix copes with lost packets.

The base weight matrix W = I - eps*L would be used if every packet
arrived. Each slot we instead keep only the entries whose packets got
through and dump the lost weight back on the diagonal, so every row
still sums to one and the update stays an average.
"""

import numpy as np

from radsgd.mac import AccessPolicy, sample_broadcast, transmission_matrix
from radsgd.mixing import (
    base_weight_matrix,
    compensate,
    default_epsilon,
    expected_weight_matrix,
    mask_by_transmission,
)
from radsgd.topology import ring

g = ring(5)
eps = default_epsilon(g)
w = base_weight_matrix(g, eps)
policy = AccessPolicy.uniform(g.n, 1 / 3)
rng = np.random.default_rng(4)

print(f"base weights (eps = {eps:.3f}):")
print(np.round(w, 3))

print("\nthree sampled slots:")
for slot in range(3):
    t = transmission_matrix(g, sample_broadcast(policy, rng))
    w_bar = compensate(mask_by_transmission(w, t))
    print(f"  slot {slot}, delivered entries {int(t.sum() - g.n)}:")
    print(np.round(w_bar, 3))
    assert np.allclose(w_bar.sum(axis=1), 1.0)

# Averaged over many slots the realized matrices converge to a closed
# form: off-diagonal entries get scaled by the per-link success
# probability, the diagonal absorbs the rest.
expected = expected_weight_matrix(g, w, policy)
slots = 20_000
total = np.zeros((g.n, g.n))
for _ in range(slots):
    t = transmission_matrix(g, sample_broadcast(policy, rng))
    total += compensate(mask_by_transmission(w, t))

print(f"\nexpected matrix (closed form):")
print(np.round(expected, 4))
print(f"largest deviation of the {slots}-slot mean: "
      f"{np.abs(total / slots - expected).max():.4f}")
