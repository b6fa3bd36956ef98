"""Inhomogeneous Gaussian walks, their bridge decomposition and barrier events.

With ``V(k)`` the cumulative variance of the first ``k`` increments, the walk
splits as ``S(k) = s_k(S_n) + R_k`` where ``s_k(x) = x V(k) / V(n)`` and the
fluctuation ``R_k`` is a centred Gaussian sequence independent of ``S_n`` with
``Var R_k = V(k) (V(n) - V(k)) / V(n)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .env import VarianceProfile
from .gauss import log_q

LOG2 = math.log(2.0)
_BATCH_CELLS = 2_000_000


def _batches(trials: int, n: int):
    size = max(1, _BATCH_CELLS // max(n, 1))
    done = 0
    while done < trials:
        b = min(size, trials - done)
        yield b
        done += b


@dataclass(frozen=True)
class BridgeSpec:
    n: int
    profile: VarianceProfile
    c_f: float = 3.0
    cumvar: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.c_f < 0:
            raise ValueError("c_f must be non-negative")
        object.__setattr__(self, "cumvar", self.profile.cumulative_variance(self.n))

    def _check(self, k: int):
        if not 0 <= k <= self.n:
            raise ValueError(f"level {k} outside [0, {self.n}]")


@dataclass(frozen=True)
class BarrierSpec:
    """Bridge barrier ``L(k) + y`` with ``L(k) = coefficient * log min(k, n - k)``."""
    n: int
    y: float = 0.0
    coefficient: float = 100.0

    def __post_init__(self):
        if self.n < 4:
            raise ValueError("barrier needs n >= 4")
        if self.y < 0:
            raise ValueError("y must be non-negative")

    def barrier(self) -> np.ndarray:
        k = np.arange(self.n + 1)
        out = np.zeros(self.n + 1)
        inner = k[1:self.n]
        out[1:self.n] = self.coefficient * np.log(np.minimum(inner, self.n - inner))
        return out


def interpolant(spec: BridgeSpec, k: int, x: float) -> float:
    spec._check(k)
    V = spec.cumvar
    return x * V[k] / V[spec.n] if spec.n else 0.0


def interpolants(spec: BridgeSpec, x) -> np.ndarray:
    """``s_k(x)`` for all ``k``; ``x`` may be an array of endpoints."""
    w = spec.cumvar / spec.cumvar[-1] if spec.n else np.zeros(1)
    return np.multiply.outer(np.asarray(x, dtype=float), w)


def envelope(spec: BridgeSpec, k: int) -> float:
    spec._check(k)
    return spec.c_f * min(k, spec.n - k) ** (2.0 / 3.0)


def envelopes(spec: BridgeSpec) -> np.ndarray:
    k = np.arange(spec.n + 1)
    return spec.c_f * np.minimum(k, spec.n - k) ** (2.0 / 3.0)


def bridge_variance(spec: BridgeSpec, k: int) -> float:
    spec._check(k)
    V = spec.cumvar
    if spec.n == 0:
        return 0.0
    return V[k] * (V[-1] - V[k]) / V[-1]


def bridge_variances(spec: BridgeSpec) -> np.ndarray:
    V = spec.cumvar
    if spec.n == 0:
        return np.zeros(1)
    return V * (V[-1] - V) / V[-1]


def sample_walks(profile: VarianceProfile, n: int, trials: int, rng) -> np.ndarray:
    """``(trials, n + 1)`` array of independent walks started at 0."""
    sd = np.sqrt(profile.step_variances(n))
    out = np.zeros((trials, n + 1))
    if n:
        np.cumsum(rng.standard_normal((trials, n)) * sd, axis=1, out=out[:, 1:])
    return out


def sample_walk(profile: VarianceProfile, n: int, rng) -> np.ndarray:
    return sample_walks(profile, n, 1, rng)[0]


def fluctuations(spec: BridgeSpec, walks: np.ndarray) -> np.ndarray:
    """``R_k = S(k) - s_k(S_n)`` for each row of ``walks``."""
    return walks - interpolants(spec, walks[..., -1])


def sample_bridges(spec: BridgeSpec, x, trials: int, rng) -> np.ndarray:
    """Walks conditioned on ``S_n = x``: ``s_k(x)`` plus an independent fluctuation."""
    w = sample_walks(spec.profile, spec.n, trials, rng)
    out = fluctuations(spec, w) + interpolants(spec, x)
    out[:, -1] = x
    return out


def sample_bridge(spec: BridgeSpec, x: float, rng) -> np.ndarray:
    return sample_bridges(spec, x, 1, rng)[0]


def _binomial(hits: int, trials: int) -> tuple[float, float]:
    p = hits / trials
    return p, math.sqrt(p * (1.0 - p) / trials)


def envelope_probability(spec: BridgeSpec, trials: int, rng) -> tuple[float, float]:
    """MC estimate of ``P(|R_k| <= f_k for all k)`` with its binomial standard error."""
    if trials < 100:
        raise ValueError("envelope_probability needs at least 100 trials")
    f = envelopes(spec)
    hits = 0
    for b in _batches(trials, spec.n):
        r = fluctuations(spec, sample_walks(spec.profile, spec.n, b, rng))
        hits += int(np.count_nonzero(np.all(np.abs(r) <= f, axis=1)))
    return _binomial(hits, trials)


def bb_barrier_probability(spec: BarrierSpec, trials: int, rng) -> tuple[float, float]:
    """MC estimate of ``P(B_k - (k/n) B_n <= L(k) + y for all k)``, standard increments."""
    if trials < 1000:
        raise ValueError("bb_barrier_probability needs at least 1000 trials")
    n = spec.n
    level = spec.barrier() + spec.y
    ramp = np.arange(n + 1) / n
    std = VarianceProfile.homogeneous(1.0)
    hits = 0
    for b in _batches(trials, n):
        w = sample_walks(std, n, b, rng)
        br = w - np.multiply.outer(w[:, -1], ramp)
        hits += int(np.count_nonzero(np.all(br <= level, axis=1)))
    return _binomial(hits, trials)


def log_first_moment(profile: VarianceProfile, n: int, x) -> np.ndarray:
    """``log(2^n P(S_n > x))``: expected number of generation-n particles above x."""
    sd = math.sqrt(profile.total_variance(n)) if n else 0.0
    x = np.asarray(x, dtype=float)
    if sd == 0.0:
        return np.where(x < 0, 0.0, -np.inf)
    return n * LOG2 + log_q(x / sd)


def first_moment_tail_bound(profile: VarianceProfile, n: int, x):
    """Markov bound ``min(1, 2^n P(S_n > x)) >= P(M_n > x)``."""
    if n < 1:
        raise ValueError("first_moment_tail_bound needs n >= 1")
    profile.boundaries(n)
    out = np.exp(np.minimum(0.0, log_first_moment(profile, n, x)))
    return float(out) if out.ndim == 0 else out
