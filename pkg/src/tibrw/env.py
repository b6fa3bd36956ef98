"""Piecewise-constant variance environments.

A profile is a fixed, n-independent list of segments ``(fraction, variance)``.
For a walk of length ``n`` segment ``j`` governs the increments taken at steps
``[T_{j-1} n, T_j n)`` where ``T_j`` is the cumulative fraction.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

FRACTION_TOL = 1e-12
EQUAL_RTOL = 1e-12


class Regime(str, Enum):
    HOMOGENEOUS = "homogeneous"
    INCREASING = "increasing"
    DECREASING = "decreasing"
    GENERAL = "general"


class ProfileError(ValueError):
    """Invalid profile, or a walk length incompatible with it."""


def _close(a: float, b: float) -> bool:
    return abs(a - b) <= EQUAL_RTOL * max(abs(a), abs(b))


@dataclass(frozen=True)
class VarianceProfile:
    fractions: tuple[float, ...]
    variances: tuple[float, ...]

    def __post_init__(self):
        fr = tuple(float(t) for t in self.fractions)
        va = tuple(float(v) for v in self.variances)
        object.__setattr__(self, "fractions", fr)
        object.__setattr__(self, "variances", va)
        if not fr:
            raise ProfileError("profile needs at least one segment")
        if len(fr) != len(va):
            raise ProfileError("fractions and variances differ in length")
        if any(not (0.0 < t <= 1.0) for t in fr):
            raise ProfileError(f"fractions must lie in (0, 1]: {fr}")
        if abs(math.fsum(fr) - 1.0) > FRACTION_TOL:
            raise ProfileError(f"fractions sum to {math.fsum(fr)!r}, not 1")
        if any(not (v > 0.0 and math.isfinite(v)) for v in va):
            raise ProfileError(f"variances must be positive and finite: {va}")

    @classmethod
    def from_segments(cls, segments) -> "VarianceProfile":
        """Build from ``[(t, var), ...]`` or ``[{"t": .., "var": ..}, ...]``."""
        fr, va = [], []
        for seg in segments:
            if isinstance(seg, dict):
                try:
                    t, v = seg["t"], seg["var"]
                except KeyError as exc:
                    raise ProfileError(f"segment {seg!r} lacks key {exc}") from None
            else:
                t, v = seg
            fr.append(t)
            va.append(v)
        return cls(tuple(fr), tuple(va))

    @classmethod
    def homogeneous(cls, variance: float) -> "VarianceProfile":
        return cls((1.0,), (variance,))

    @classmethod
    def two_phase(cls, var1: float, var2: float) -> "VarianceProfile":
        """The half/half environment with variances ``var1`` then ``var2``."""
        return cls((0.5, 0.5), (var1, var2))

    @classmethod
    def from_json(cls, text_or_path: str | Path) -> "VarianceProfile":
        """Parse inline JSON, or read it from a file if the argument is a path."""
        text = str(text_or_path)
        p = Path(text)
        if not text.lstrip().startswith(("[", "{")) and p.exists():
            text = p.read_text()
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ProfileError(f"profile is not valid JSON: {exc}") from None
        if isinstance(data, dict):
            data = data.get("profile", data.get("segments"))
        if not isinstance(data, list):
            raise ProfileError("profile JSON must be a list of {t, var} objects")
        return cls.from_segments(data)

    def to_json(self) -> list[dict]:
        return [{"t": t, "var": v} for t, v in zip(self.fractions, self.variances)]

    @property
    def k(self) -> int:
        return len(self.fractions)

    @property
    def sigmas(self) -> np.ndarray:
        return np.sqrt(np.asarray(self.variances))

    @property
    def max_variance(self) -> float:
        return max(self.variances)

    def reversed(self) -> "VarianceProfile":
        return VarianceProfile(self.fractions[::-1], self.variances[::-1])

    def boundaries(self, n: int) -> list[int]:
        """Integer step boundaries ``[0, b_1, ..., n]``; raises if not integral."""
        if n < 0:
            raise ProfileError(f"walk length must be non-negative, got {n}")
        out = [0]
        cum = 0.0
        for t in self.fractions:
            cum += t
            b = cum * n
            r = round(b)
            if abs(b - r) > 1e-9 * max(1.0, n):
                raise ProfileError(
                    f"n={n} puts a segment boundary at non-integer step {b:g}")
            out.append(int(r))
        out[-1] = n
        return out

    def is_compatible(self, n: int) -> bool:
        try:
            self.boundaries(n)
        except ProfileError:
            return False
        return True

    def step_variances(self, n: int) -> np.ndarray:
        """Variance of each of the ``n`` increments, as an array."""
        b = self.boundaries(n)
        out = np.empty(n)
        for j, v in enumerate(self.variances):
            out[b[j]:b[j + 1]] = v
        return out

    def cumulative_variance(self, n: int) -> np.ndarray:
        """``V[k] = sum_{j<k} variance_at(j)`` for ``k = 0..n``."""
        return np.concatenate([[0.0], np.cumsum(self.step_variances(n))])

    def total_variance(self, n: int) -> float:
        return n * math.fsum(t * v for t, v in zip(self.fractions, self.variances))


def variance_at(profile: VarianceProfile, step: int, n: int) -> float:
    """Variance of the increment taken from ``step`` to ``step + 1``."""
    if not 0 <= step < n:
        raise ProfileError(f"step {step} outside [0, {n})")
    b = profile.boundaries(n)
    for j in range(profile.k):
        if b[j] <= step < b[j + 1]:
            return profile.variances[j]
    raise AssertionError("unreachable: boundaries cover [0, n)")


def classify(profile: VarianceProfile) -> Regime:
    v = profile.variances
    pairs = list(zip(v[:-1], v[1:]))
    if all(_close(a, b) for a, b in pairs):
        return Regime.HOMOGENEOUS
    if all(a < b and not _close(a, b) for a, b in pairs):
        return Regime.INCREASING
    if all(a > b and not _close(a, b) for a, b in pairs):
        return Regime.DECREASING
    return Regime.GENERAL
