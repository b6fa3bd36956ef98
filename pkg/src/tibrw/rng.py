"""Per-trial random streams.

Trial ``i`` of a run with master seed ``s`` draws from a Philox generator keyed
by ``s`` whose counter starts at ``i`` in its most significant word. Streams are
therefore disjoint, cheap to create in any order, and a run's output depends
only on ``(seed, config)`` and never on how trials are scheduled over threads.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence, TypeVar

import numpy as np

T = TypeVar("T")

_MASK64 = (1 << 64) - 1


def _key(seed: int) -> np.ndarray:
    if seed < 0:
        raise ValueError("seed must be non-negative")
    return np.random.SeedSequence(seed).generate_state(2, np.uint64)


def trial_stream(seed: int, trial: int) -> np.random.Generator:
    counter = np.array([0, 0, 0, trial & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(counter=counter, key=_key(seed)))


def run_trials(fn: Callable[[np.random.Generator], T], seed: int, trials: int,
               threads: int = 1) -> list[T]:
    """Evaluate ``fn(stream_i)`` for each trial, returned in trial order."""
    key = _key(seed)

    def one(i: int) -> T:
        counter = np.array([0, 0, 0, i], dtype=np.uint64)
        return fn(np.random.Generator(np.random.Philox(counter=counter, key=key)))

    if threads <= 1 or trials < 2:
        return [one(i) for i in range(trials)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(one, range(trials)))


def uniforms(seed: int, trials: int) -> np.ndarray:
    """One uniform per trial, the first draw of each trial stream."""
    return np.array(run_trials(lambda g: g.random(), seed, trials))


def as_generator(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def chunks(n: int, size: int) -> Sequence[int]:
    return [min(size, n - i) for i in range(0, n, size)]
