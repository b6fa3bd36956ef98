"""
Bridges, envelopes and barriers
===============================

The walk minus its endpoint interpolant is independent of the endpoint; the
fluctuation stays inside a k^(2/3) envelope with probability bounded below in
n; a bridge stays under a logarithmic barrier with probability of order 1/n.
"""

import numpy as np

from tibrw import VarianceProfile
from tibrw.rng import trial_stream
from tibrw.walks import (BarrierSpec, BridgeSpec, bb_barrier_probability, bridge_variances,
                         envelope_probability, fluctuations, sample_walks)

prof = VarianceProfile.two_phase(1.0, 4.0)

# the fluctuation is uncorrelated with the endpoint
spec = BridgeSpec(64, prof)
w = sample_walks(prof, 64, 50_000, trial_stream(0, 0))
r = fluctuations(spec, w)
corr = [np.corrcoef(r[:, k], w[:, -1])[0, 1] for k in (8, 32, 56)]
print("corr(R_k, S_n) at k = 8, 32, 56:", np.round(corr, 4))
print("Var R_k empirical:", np.round(r[:, [8, 32, 56]].var(axis=0), 2),
      "closed form:", np.round(bridge_variances(spec)[[8, 32, 56]], 2))

# envelope probability does not decay with n
for n in (16, 64, 256):
    p, se = envelope_probability(BridgeSpec(n, prof, c_f=6.0), 10_000, trial_stream(1, n))
    print(f"envelope n={n:4d}: {p:.4f} +- {se:.4f}")

# barrier probability times n stays bounded
for n in (64, 256, 1024):
    p, _ = bb_barrier_probability(BarrierSpec(n, y=1.0, coefficient=1.0), 50_000,
                                  trial_stream(2, n))
    print(f"barrier n={n:4d}: p = {p:.5f}, p*n/(1+y)^2 = {p * n / 4:.3f}")
