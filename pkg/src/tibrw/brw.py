"""Maximum of binary branching random walks in a variance profile.

Engines
-------
exact
    Every one of the ``2^k`` particles is kept, level by level.
pruned
    After each level only particles within ``window`` of the level maximum are
    kept, and at most the ``cap`` highest of those. Trials whose population was
    truncated by the cap are flagged in ``MaxSample.capped``.
greedy
    At each segment boundary the population collapses onto its (first) argmax,
    which seeds the next segment. The per-segment engine is ``sub``.
law
    The distribution of ``M_n`` is computed by the tail recursion
    ``Q_k(z) = 1 - (1 - E Q_{k+1}(z - X_k))^2`` on a uniform grid and each trial
    is an inverse-CDF draw from it. Exact in law up to grid resolution, and the
    only engine that reaches ``n`` in the hundreds when the maximiser's ancestry
    runs far behind the front (increasing variances).
independent
    ``2^n`` independent walks: ``P(M <= x) = Phi(x / sqrt(V_n))^(2^n)`` inverted
    in log space.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq
from scipy.special import ndtr

from .env import VarianceProfile
from .gauss import log_expm1_neg, log_q, upper_quantile_log
from .rng import run_trials

LOG2 = math.log(2.0)
EXACT_MAX_N = 26
DEFAULT_CF = 3.0
DEFAULT_CAP = 1_000_000


class Mode(str, Enum):
    EXACT = "exact"
    PRUNED = "pruned"
    GREEDY = "greedy"
    LAW = "law"
    INDEPENDENT = "independent"


class ConfigError(ValueError):
    pass


def default_window(n: int, c_f: float = DEFAULT_CF) -> float:
    """Pruning window on the scale of the bridge envelope at mid-time."""
    return 6.0 * c_f * max(n / 2.0, 1.0) ** (2.0 / 3.0)


@dataclass(frozen=True)
class TrialConfig:
    profile: VarianceProfile
    n: int
    mode: Mode = Mode.EXACT
    seed: int = 0
    trials: int = 1
    window: float | None = None
    cap: int = DEFAULT_CAP
    sub: Mode = Mode.EXACT          # per-segment engine of greedy mode
    grid_step: float = 0.02         # law engine resolution
    child_order: str = "forward"

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        object.__setattr__(self, "sub", Mode(self.sub))
        if self.n < 0 or self.trials < 1:
            raise ConfigError("need n >= 0 and trials >= 1")
        if not self.profile.is_compatible(self.n):
            raise ConfigError(f"n={self.n} is incompatible with profile boundaries")
        if self.mode is Mode.EXACT and self.n > EXACT_MAX_N:
            raise ConfigError(f"exact mode holds 2^n particles; n={self.n} > {EXACT_MAX_N}")
        if self.window is not None and not self.window > 0:
            raise ConfigError("pruning window must be positive")
        if self.cap < 1:
            raise ConfigError("cap must be positive")
        if self.mode is Mode.GREEDY:
            if self.sub not in (Mode.EXACT, Mode.PRUNED, Mode.LAW):
                raise ConfigError("greedy sub-engine must be exact, pruned or law")
            if self.sub is Mode.EXACT:
                b = self.profile.boundaries(self.n)
                if max(np.diff(b), default=0) > EXACT_MAX_N:
                    raise ConfigError("a greedy segment is too long for the exact engine")
        if self.child_order not in ("forward", "reverse"):
            raise ConfigError("child_order is 'forward' or 'reverse'")

    @property
    def resolved_window(self) -> float:
        return default_window(self.n) if self.window is None else self.window

    def to_dict(self) -> dict:
        return {
            "profile": self.profile.to_json(), "n": self.n, "mode": self.mode.value,
            "seed": self.seed, "trials": self.trials,
            "window": self.resolved_window if self.mode in (Mode.PRUNED, Mode.GREEDY) else None,
            "cap": self.cap, "sub": self.sub.value, "grid_step": self.grid_step,
            "child_order": self.child_order,
        }


@dataclass
class MaxSample:
    values: np.ndarray
    config: TrialConfig
    capped: np.ndarray = field(default=None)
    draws: np.ndarray = field(default=None)

    def __post_init__(self):
        t = len(self.values)
        if self.capped is None:
            self.capped = np.zeros(t, dtype=bool)
        if self.draws is None:
            self.draws = np.zeros(t, dtype=np.int64)

    @property
    def cap_hits(self) -> int:
        return int(np.count_nonzero(self.capped))

    def __len__(self) -> int:
        return len(self.values)


# -- particle engines ---------------------------------------------------------

def _branch(x: np.ndarray, sd: float, rng, reverse: bool) -> np.ndarray:
    y = np.repeat(x, 2)
    y += sd * rng.standard_normal(y.size)
    if reverse:
        y = y.reshape(-1, 2)[:, ::-1].ravel()
    return y


def _run_particles(step_sd: np.ndarray, rng, start: float = 0.0, window: float = math.inf,
                   cap: int | None = None, reverse: bool = False):
    """Evolve one trial; returns (final population, capped flag, increments drawn)."""
    x = np.array([start])
    capped = False
    draws = 0
    for sd in step_sd:
        y = _branch(x, sd, rng, reverse)
        draws += y.size
        if window != math.inf:
            y = y[y >= y.max() - window]
        if cap is not None and y.size > cap:
            y = np.partition(y, y.size - cap)[y.size - cap:]
            capped = True
        x = y
    return x, capped, draws


def _particle_trial(cfg: TrialConfig, pruned: bool):
    sd = np.sqrt(cfg.profile.step_variances(cfg.n))
    window = cfg.resolved_window if pruned else math.inf
    cap = cfg.cap if pruned else None
    reverse = cfg.child_order == "reverse"

    def trial(rng):
        x, capped, draws = _run_particles(sd, rng, window=window, cap=cap, reverse=reverse)
        return float(x.max()), capped, draws
    return trial


def _collect(cfg: TrialConfig, trial, threads: int) -> MaxSample:
    out = run_trials(trial, cfg.seed, cfg.trials, threads)
    vals, capped, draws = zip(*out)
    return MaxSample(np.array(vals, dtype=float), cfg,
                     np.array(capped, dtype=bool), np.array(draws, dtype=np.int64))


def simulate_max(cfg: TrialConfig, threads: int = 1) -> MaxSample:
    """Full binary BRW; memory ``O(2^n)`` per trial."""
    if cfg.mode is not Mode.EXACT:
        cfg = replace(cfg, mode=Mode.EXACT)
    return _collect(cfg, _particle_trial(cfg, pruned=False), threads)


def simulate_max_pruned(cfg: TrialConfig, threads: int = 1) -> MaxSample:
    if cfg.mode is not Mode.PRUNED:
        cfg = replace(cfg, mode=Mode.PRUNED)
    return _collect(cfg, _particle_trial(cfg, pruned=True), threads)


# -- law engine ---------------------------------------------------------------

@dataclass(frozen=True)
class MaxLaw:
    """Tail function ``P(M_n > z)`` tabulated on a uniform grid."""
    z: np.ndarray
    tail: np.ndarray

    def sf(self, x):
        return np.interp(x, self.z, self.tail, left=1.0, right=0.0)

    def cdf(self, x):
        return 1.0 - self.sf(x)

    def quantile(self, p):
        """Smallest grid-interpolated ``x`` with ``P(M <= x) >= p``."""
        p = np.asarray(p, dtype=float)
        # strictly decreasing part of the tail
        keep = np.concatenate([[True], np.diff(self.tail) < 0])
        z, q = self.z[keep], self.tail[keep]
        return np.interp(1.0 - p, q[::-1], z[::-1])

    def median(self) -> float:
        return float(self.quantile(0.5))


def _gauss_kernel(sd: float, h: float) -> np.ndarray:
    w = int(math.ceil(10.0 * sd / h))
    # left half from lower-tail values only, so tiny weights keep relative accuracy
    edges = (np.arange(-w, 1) - 0.5) * h
    left = np.diff(np.append(ndtr(edges / sd), 0.5))
    left[-1] *= 2.0  # centre cell straddles 0
    return np.concatenate([left, left[-2::-1]])


@lru_cache(maxsize=64)
def _law(profile: VarianceProfile, n: int, h: float) -> MaxLaw:
    if n == 0:
        return MaxLaw(np.array([-h, 0.0, h]), np.array([1.0, 0.5, 0.0]))
    var = profile.step_variances(n)
    sd_tot = math.sqrt(var.sum())
    # P(M > x) <= 2^n P(S_n > x): beyond u_hi the tail is below e^-40.
    u_hi = float(upper_quantile_log(-n * LOG2 - 40.0))
    hi = math.ceil(sd_tot * u_hi / h) * h
    lo = -math.ceil(9.0 * sd_tot / h) * h
    z = np.arange(round(lo / h), round(hi / h) + 1) * h
    tail = (z < 0).astype(float)
    tail[np.isclose(z, 0.0, atol=h / 4)] = 0.5
    kernels = {}
    for sd in np.sqrt(var)[::-1]:
        if sd not in kernels:
            kernels[sd] = _gauss_kernel(sd, h)
        ker = kernels[sd]
        w = ker.size // 2
        padded = np.concatenate([np.ones(w), tail, np.zeros(w)])
        # positive summands only: deep-tail values keep full relative precision
        e = np.clip(np.convolve(padded, ker[::-1], mode="valid"), 0.0, 1.0)
        tail = e * (2.0 - e)
    return MaxLaw(z, tail)


def max_law(profile: VarianceProfile, n: int, grid_step: float = 0.02) -> MaxLaw:
    """Distribution of the BRW maximum at generation ``n``."""
    if not profile.is_compatible(n):
        raise ConfigError(f"n={n} is incompatible with profile boundaries")
    return _law(profile, n, float(grid_step))


def sample_law(cfg: TrialConfig, threads: int = 1) -> MaxSample:
    law = max_law(cfg.profile, cfg.n, cfg.grid_step)
    u = np.array(run_trials(lambda g: g.random(), cfg.seed, cfg.trials, threads))
    cfg = replace(cfg, mode=Mode.LAW) if cfg.mode is not Mode.LAW else cfg
    if cfg.n == 0:
        return MaxSample(np.zeros(cfg.trials), cfg)   # point mass at the root
    return MaxSample(law.quantile(u), cfg)


# -- greedy -------------------------------------------------------------------

def simulate_greedy(cfg: TrialConfig, threads: int = 1) -> MaxSample:
    """Collapse onto the argmax at every segment boundary."""
    b = cfg.profile.boundaries(cfg.n)
    segs = [(b[j + 1] - b[j], math.sqrt(v)) for j, v in enumerate(cfg.profile.variances)]
    reverse = cfg.child_order == "reverse"
    laws = None
    if cfg.sub is Mode.LAW:
        laws = [max_law(VarianceProfile.homogeneous(sd * sd), m, cfg.grid_step)
                if m else None for m, sd in segs]
    pruned = cfg.sub is Mode.PRUNED

    def trial(rng):
        x, capped, draws = 0.0, False, 0
        for j, (m, sd) in enumerate(segs):
            if m == 0:
                continue
            if laws is not None:
                x += float(laws[j].quantile(rng.random()))
                continue
            if pruned:
                window = default_window(m) if cfg.window is None else cfg.window
            else:
                window = math.inf
            pop, c, d = _run_particles(np.full(m, sd), rng, start=x, window=window,
                                       cap=cfg.cap if pruned else None, reverse=reverse)
            x = float(pop[np.argmax(pop)])
            capped |= c
            draws += d
        return x, capped, draws

    return _collect(cfg, trial, threads)


# -- independent walks ----------------------------------------------------------

def _independent_values(profile: VarianceProfile, n: int, u: np.ndarray) -> np.ndarray:
    sd = math.sqrt(profile.total_variance(n))
    if n == 0:
        return np.zeros_like(u)
    # P(M <= x) = Phi(x/sd)^(2^n) = U  <=>  P(Z > x/sd) = 1 - exp(-q),
    # q = 2^-n (-log U)
    logq = -n * LOG2 + np.log(-np.log(u))
    return sd * upper_quantile_log(log_expm1_neg(logq))


def sample_independent_max(cfg: TrialConfig, threads: int = 1) -> MaxSample:
    u = np.array(run_trials(lambda g: g.random(), cfg.seed, cfg.trials, threads))
    # u == 0 has probability 2^-53 per draw; map it to the smallest positive double
    u = np.where(u > 0.0, u, np.nextafter(0.0, 1.0))
    cfg = replace(cfg, mode=Mode.INDEPENDENT) if cfg.mode is not Mode.INDEPENDENT else cfg
    return MaxSample(_independent_values(cfg.profile, cfg.n, u), cfg)


def median_of_exact_independent_cdf(profile: VarianceProfile, n: int) -> float:
    """Root of ``Phi(x / sqrt(V_n))^(2^n) = 1/2`` by bracketed root finding."""
    if n < 1:
        raise ValueError("n must be positive")
    sd = math.sqrt(profile.total_variance(n))
    target = float(log_expm1_neg(-n * LOG2 + math.log(LOG2)))

    def f(u):
        return float(log_q(u)) - target

    lo, hi = -1.0, 1.0
    while f(hi) > 0:
        hi *= 2.0
    while f(lo) < 0:
        lo *= 2.0
    u = brentq(f, lo, hi, xtol=1e-13, rtol=4 * np.finfo(float).eps, maxiter=500)
    return sd * u


# -- dispatch -------------------------------------------------------------------

def simulate(cfg: TrialConfig, threads: int = 1) -> MaxSample:
    return {
        Mode.EXACT: simulate_max,
        Mode.PRUNED: simulate_max_pruned,
        Mode.GREEDY: simulate_greedy,
        Mode.LAW: sample_law,
        Mode.INDEPENDENT: sample_independent_max,
    }[cfg.mode](cfg, threads)
