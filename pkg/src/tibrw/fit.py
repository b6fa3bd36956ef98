"""Recovering the velocity and logarithmic correction from medians."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import binom, norm

SQRT_2LOG2 = math.sqrt(2.0 * math.log(2.0))


class FitError(ValueError):
    pass


def sample_median(values) -> float:
    """``sup{x : F_N(x) <= 1/2}`` for the empirical CDF ``F_N``."""
    v = np.sort(np.asarray(values, dtype=float))
    return float(v[len(v) // 2])


def estimate_median(samples, level: float = 0.95) -> tuple[float, float]:
    """Sample median and the half-width of its distribution-free CI.

    The interval is ``[x_(j), x_(k)]`` with ranks from Binomial(N, 1/2) quantiles.
    Accepts a ``MaxSample`` or any array of values.
    """
    values = getattr(samples, "values", samples)
    v = np.sort(np.asarray(values, dtype=float))
    n = v.size
    if n < 50:
        raise FitError(f"median CI needs at least 50 trials, got {n}")
    a = (1.0 - level) / 2.0
    j = int(binom.ppf(a, n, 0.5))          # 1-based lower rank
    k = int(binom.isf(a, n, 0.5)) + 1      # 1-based upper rank
    j = max(j, 1)
    k = min(k, n)
    return sample_median(v), 0.5 * float(v[k - 1] - v[j - 1])


def median_standard_error(values) -> float:
    """Order-statistic CI half-width expressed as a normal-scale standard error."""
    return estimate_median(values)[1] / norm.ppf(0.975)


@dataclass
class FitResult:
    a: float
    b: float
    c: float
    beta_hat: float
    residuals: list[tuple[float, float]]
    covariance: np.ndarray
    constrained: bool = False

    @property
    def sigma_eff_hat(self) -> float:
        return self.a / SQRT_2LOG2

    def to_dict(self) -> dict:
        return {
            "a": self.a, "b": self.b, "c": self.c, "beta_hat": self.beta_hat,
            "sigma_eff_hat": self.sigma_eff_hat, "constrained": self.constrained,
            "residuals": [[float(n), float(r)] for n, r in self.residuals],
            "covariance": np.asarray(self.covariance).tolist(),
        }


def fit_correction(points, sigma_eff_known: float | None = None) -> FitResult:
    """Least squares for ``median ~ a n - b log n + c``.

    With ``sigma_eff_known`` the slope is pinned to ``sqrt(2 log 2) sigma_eff``
    and only ``(b, c)`` are estimated.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise FitError("points must be (n, median) pairs")
    n, med = pts[:, 0], pts[:, 1]
    distinct = np.unique(n)
    if distinct.size < 4 or distinct.max() < 8 * distinct.min():
        raise FitError("need at least 4 distinct n spanning a factor of 8")

    logn = np.log(n)
    if sigma_eff_known is None:
        X = np.column_stack([n, -logn, np.ones_like(n)])
        y = med
    else:
        a_fixed = SQRT_2LOG2 * sigma_eff_known
        X = np.column_stack([-logn, np.ones_like(n)])
        y = med - a_fixed * n
    if np.linalg.matrix_rank(X) < X.shape[1]:
        raise FitError("rank-deficient design: n values too clustered")
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    resid = y - X @ coef
    dof = len(y) - X.shape[1]
    s2 = float(resid @ resid) / dof if dof > 0 else 0.0
    cov = s2 * np.linalg.inv(X.T @ X)

    if sigma_eff_known is None:
        a, b, c = (float(x) for x in coef)
    else:
        a = a_fixed
        b, c = (float(x) for x in coef)
        full = np.zeros((3, 3))
        full[1:, 1:] = cov
        cov = full
    beta_hat = b * SQRT_2LOG2 / (a / SQRT_2LOG2)
    return FitResult(a, b, c, beta_hat, list(zip(n.tolist(), resid.tolist())), cov,
                     constrained=sigma_eff_known is not None)


@dataclass
class TightnessReport:
    iqr: dict[int, float]
    ratio: float
    flagged: bool
    threshold: float = 2.0


def _iqr(values) -> float:
    q1, q3 = np.quantile(np.asarray(values, dtype=float), [0.25, 0.75])
    return float(q3 - q1)


def tightness_check(batches, threshold: float = 2.0) -> TightnessReport:
    """Spread of ``M_n - Med(M_n)`` across ``n``; flags a max/min IQR ratio above 2."""
    if len(batches) < 3:
        raise FitError("tightness check needs at least 3 values of n")
    iqr = {}
    for n, s in sorted(batches.items()):
        v = np.asarray(getattr(s, "values", s), dtype=float)
        if v.size < 500:
            raise FitError(f"n={n}: tightness check needs 500 trials, got {v.size}")
        iqr[n] = _iqr(v - sample_median(v))
    ratio = max(iqr.values()) / min(iqr.values())
    return TightnessReport(iqr, ratio, bool(ratio > threshold), threshold)
