"""Sample-path large-deviation cost of macroscopic paths and the optimal speed.

A path ``phi`` on [0, 1] with ``phi(0) = 0`` survives in the branching system only
if its cumulative cost never outruns the branching gain,

    I_s(phi) = int_0^s phi'(r)^2 / (2 sigma^2(r)) dr  <=  s log 2   for all s.

For piecewise-linear paths both sides are affine in ``s`` between consecutive
breakpoints (path kinks merged with profile boundaries), so checking the
constraint at the merged breakpoints is exact. ``feasible`` relies on this.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .env import Regime, VarianceProfile, classify

LOG2 = math.log(2.0)
CLOSED_FORM_TOL = 1e-12
NUMERIC_TOL = 1e-8


class SolverError(RuntimeError):
    pass


@dataclass(frozen=True)
class PiecewiseLinearPath:
    s: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        s = tuple(float(x) for x in self.s)
        v = tuple(float(x) for x in self.values)
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "values", v)
        if len(s) != len(v) or len(s) < 2:
            raise ValueError("path needs at least two breakpoints")
        if s[0] != 0.0 or v[0] != 0.0:
            raise ValueError("path must start at (0, 0)")
        if any(b <= a for a, b in zip(s[:-1], s[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        if abs(s[-1] - 1.0) > 1e-12:
            raise ValueError("last breakpoint must be at s = 1")

    @classmethod
    def from_slopes(cls, fractions, slopes) -> "PiecewiseLinearPath":
        s = np.concatenate([[0.0], np.cumsum(fractions)])
        s[-1] = 1.0
        v = np.concatenate([[0.0], np.cumsum(np.asarray(fractions) * np.asarray(slopes))])
        return cls(tuple(s), tuple(v))

    @classmethod
    def zero(cls) -> "PiecewiseLinearPath":
        return cls((0.0, 1.0), (0.0, 0.0))

    @property
    def slopes(self) -> np.ndarray:
        return np.diff(self.values) / np.diff(self.s)

    @property
    def endpoint(self) -> float:
        return self.values[-1]

    def __call__(self, x):
        return np.interp(x, self.s, self.values)

    def breakpoints(self) -> list[tuple[float, float]]:
        return list(zip(self.s, self.values))


@dataclass(frozen=True)
class RateReport:
    s: np.ndarray           # merged breakpoints
    cumulative: np.ndarray  # I_s at those breakpoints
    slacks: np.ndarray      # s log 2 - I_s at those breakpoints
    feasible: bool
    slack: float            # min of ``slacks`` over [0, 1]

    def slack_at(self, s: float) -> float:
        return float(np.interp(s, self.s, self.slacks))


def _profile_breaks(profile: VarianceProfile) -> np.ndarray:
    b = np.concatenate([[0.0], np.cumsum(profile.fractions)])
    b[-1] = 1.0
    return b


def _merged(profile: VarianceProfile, path: PiecewiseLinearPath, upto: float = 1.0):
    grid = np.union1d(_profile_breaks(profile), np.asarray(path.s))
    grid = grid[grid < upto]
    return np.append(grid, upto)


def _cumulative(profile: VarianceProfile, path: PiecewiseLinearPath, grid: np.ndarray):
    """Exact I_s at each point of ``grid`` (which contains every kink below its end)."""
    mids = 0.5 * (grid[:-1] + grid[1:])
    pb = _profile_breaks(profile)
    seg = np.clip(np.searchsorted(pb, mids, side="right") - 1, 0, profile.k - 1)
    var = np.asarray(profile.variances)[seg]
    kink = np.clip(np.searchsorted(path.s, mids, side="right") - 1, 0, len(path.s) - 2)
    m = path.slopes[kink]
    pieces = np.diff(grid) * m * m / (2.0 * var)
    return np.concatenate([[0.0], np.cumsum(pieces)])


def rate(profile: VarianceProfile, path: PiecewiseLinearPath, s: float) -> float:
    """Cumulative cost ``I_s(phi)``, integrated exactly piece by piece."""
    if not 0.0 <= s <= 1.0:
        raise ValueError(f"s must lie in [0, 1], got {s}")
    if s == 0.0:
        return 0.0
    grid = _merged(profile, path, s)
    return float(_cumulative(profile, path, grid)[-1])


def feasible(profile: VarianceProfile, path: PiecewiseLinearPath,
             tol: float = CLOSED_FORM_TOL) -> RateReport:
    grid = _merged(profile, path)
    cum = _cumulative(profile, path, grid)
    slacks = grid * LOG2 - cum
    return RateReport(grid, cum, slacks, bool(np.all(slacks >= -tol)),
                      float(slacks.min()))


def _block_slopes(t: np.ndarray, var: np.ndarray, active: tuple[int, ...]) -> np.ndarray:
    """Best slopes when exactly the prefix constraints in ``active`` bind.

    Between consecutive binding prefixes the budget ``dT log 2`` is spent with
    slopes proportional to the variances (Lagrange condition ``m_j ~ sigma_j^2``).
    """
    m = np.empty_like(t)
    lo = 0
    for hi in active:
        blk = slice(lo, hi + 1)
        budget = 2.0 * LOG2 * t[blk].sum()
        m[blk] = var[blk] * math.sqrt(budget / np.dot(t[blk], var[blk]))
        lo = hi + 1
    return m


def _prefix_slack(t, var, m):
    return np.cumsum(t) * LOG2 - np.cumsum(t * m * m / (2.0 * var))


def solve_slopes(profile: VarianceProfile) -> np.ndarray:
    """Maximise ``sum t_j m_j`` under every prefix cost constraint.

    Enumerates the subsets of binding prefix constraints (the last one always
    binds), solves each in closed form and keeps the best feasible candidate.
    The problem is convex, so that candidate is the global optimum.
    """
    t = np.asarray(profile.fractions)
    var = np.asarray(profile.variances)
    k = profile.k
    best, best_obj = None, -math.inf
    for r in range(k):
        for inner in itertools.combinations(range(k - 1), r):
            m = _block_slopes(t, var, inner + (k - 1,))
            if _prefix_slack(t, var, m).min() < -NUMERIC_TOL * LOG2:
                continue
            obj = float(np.dot(t, m))
            if obj > best_obj:
                best, best_obj = m, obj
    if best is None:
        raise SolverError(f"no feasible active set for {profile}")
    return best


def optimal_curve(profile: VarianceProfile) -> tuple[PiecewiseLinearPath, float]:
    """Fastest feasible path, one linear piece per profile segment."""
    regime = classify(profile)
    sig = profile.sigmas
    var = np.asarray(profile.variances)
    half = profile.k == 2 and all(abs(t - 0.5) < 1e-15 for t in profile.fractions)
    if regime is Regime.HOMOGENEOUS:
        slopes = math.sqrt(2.0 * LOG2) * sig
    elif half and regime is Regime.INCREASING:
        slopes = 2.0 * var * math.sqrt(LOG2) / math.sqrt(var.sum())
    elif half and regime is Regime.DECREASING:
        slopes = math.sqrt(2.0 * LOG2) * sig
    else:
        slopes = solve_slopes(profile)
    path = PiecewiseLinearPath.from_slopes(profile.fractions, slopes)
    rep = feasible(profile, path, tol=NUMERIC_TOL)
    if not rep.feasible:
        raise SolverError(f"optimal curve violates the constraint by {-rep.slack:.3g}")
    return path, path.endpoint


def sample_curve(profile: VarianceProfile, path: PiecewiseLinearPath,
                 points: int = 101) -> np.ndarray:
    """Rows ``(s, phi(s), I_s, s log 2)`` on a uniform grid, for plotting."""
    s = np.linspace(0.0, 1.0, points)
    cost = np.array([rate(profile, path, x) for x in s])
    return np.column_stack([s, path(s), cost, s * LOG2])
