"""Closed-form maximal-displacement asymptotics.

Every model is reported in the common two-term form

    Med(M_n) = velocity * n - log_coeff * log n + O(1),
    velocity  = sqrt(2 log 2) * sigma_eff,
    log_coeff = beta * sigma_eff / sqrt(2 log 2).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, asdict
from enum import Enum

from .env import Regime, VarianceProfile, classify

SQRT_2LOG2 = math.sqrt(2.0 * math.log(2.0))


class Model(str, Enum):
    HOMOGENEOUS = "homogeneous"
    INCREASING = "increasing"
    DECREASING = "decreasing"
    INDEPENDENT = "independent"
    GREEDY = "greedy"


class RegimeMismatch(ValueError):
    """A model was requested for a profile outside its regime."""


@dataclass(frozen=True)
class Prediction:
    velocity: float
    log_coeff: float
    sigma_eff: float
    beta: float
    model: Model

    def to_dict(self) -> dict:
        d = asdict(self)
        d["model"] = self.model.value
        return d


_REQUIRED = {
    Model.HOMOGENEOUS: Regime.HOMOGENEOUS,
    Model.INCREASING: Regime.INCREASING,
    Model.DECREASING: Regime.DECREASING,
}


def _from_velocity(velocity: float, log_coeff: float, model: Model) -> Prediction:
    sigma_eff = velocity / SQRT_2LOG2
    beta = log_coeff * SQRT_2LOG2 / sigma_eff
    return Prediction(velocity, log_coeff, sigma_eff, beta, model)


def predict(profile: VarianceProfile, model: Model | str, *,
            check_regime: bool = True) -> Prediction:
    """Asymptotic prediction for ``model`` in environment ``profile``.

    With ``check_regime=False`` the model's formula is evaluated formally on any
    profile, which is how the continuity and phase-transition comparisons at
    equal variances are made.
    """
    model = Model(model)
    if check_regime and model in _REQUIRED:
        regime = classify(profile)
        if regime is not _REQUIRED[model]:
            raise RegimeMismatch(
                f"model {model.value!r} needs a {_REQUIRED[model].value} profile, "
                f"got {regime.value} {profile.variances}")
    t = profile.fractions
    var = profile.variances
    sig = [math.sqrt(v) for v in var]

    if model is Model.HOMOGENEOUS:
        # Formally: the segment-weighted sigma (exact when all are equal).
        s = math.fsum(ti * si for ti, si in zip(t, sig))
        return Prediction(SQRT_2LOG2 * s, 1.5 * s / SQRT_2LOG2, s, 1.5, model)

    if model in (Model.INCREASING, Model.INDEPENDENT):
        s = math.sqrt(math.fsum(ti * vi for ti, vi in zip(t, var)))
        return Prediction(SQRT_2LOG2 * s, 0.5 * s / SQRT_2LOG2, s, 0.5, model)

    # Decreasing and greedy share the phase-wise sum of homogeneous terms:
    # segment j contributes sqrt(2 log 2) sigma_j t_j n - (3/2) sigma_j log(t_j n)
    # / sqrt(2 log 2), and the log t_j pieces are absorbed in the O(1) term.
    velocity = SQRT_2LOG2 * math.fsum(ti * si for ti, si in zip(t, sig))
    log_coeff = 1.5 * math.fsum(sig) / SQRT_2LOG2
    return _from_velocity(velocity, log_coeff, model)


def evaluate_centering(p: Prediction, n: float) -> float:
    """``velocity * n - log_coeff * log n``."""
    if n < 2:
        raise ValueError(f"centering needs n >= 2, got {n}")
    return p.velocity * n - p.log_coeff * math.log(n)
