"""Gaussian tail numerics in log space.

``log_q(u) = log P(Z > u)`` stays finite for any ``u`` that a double can hold,
and ``upper_quantile_log`` inverts it for log tail probabilities far below the
smallest representable double (e.g. ``log q = -1e4``).
"""
from __future__ import annotations

import numpy as np
from scipy.special import log_ndtr, ndtri

_LOG_SQRT_2PI = 0.5 * np.log(2.0 * np.pi)


class QuantileError(ArithmeticError):
    pass


def log_q(u):
    """log of the standard normal upper tail."""
    return log_ndtr(-np.asarray(u, dtype=float))


def log_phi(u):
    u = np.asarray(u, dtype=float)
    return -0.5 * u * u - _LOG_SQRT_2PI


def log_one_minus_exp(x):
    """``log(1 - exp(x))`` for ``x < 0``, accurate at both ends."""
    x = np.asarray(x, dtype=float)
    return np.where(x > -0.6931471805599453,
                    np.log(-np.expm1(x)), np.log1p(-np.exp(x)))


def log_expm1_neg(logq):
    """Given ``log q`` with ``q > 0`` return ``log(1 - exp(-q))``.

    For tiny ``q`` this is ``log q - q/2 + ...``, evaluated without forming ``q``.
    """
    logq = np.asarray(logq, dtype=float)
    q = np.exp(np.minimum(logq, 700.0))
    tiny = logq < -20.0
    with np.errstate(divide="ignore"):
        big = log_one_minus_exp(-q)
    return np.where(tiny, logq - 0.5 * q, big)


def upper_quantile_log(logp, tol: float = 1e-13, max_iter: int = 60):
    """Solve ``log P(Z > u) = logp`` for ``u`` (vectorised).

    The starting point comes from ``ndtri`` while ``exp(logp)`` is a normal
    double and from the asymptotic tail expansion beyond; Newton's method on
    ``log_q`` then polishes to ``tol`` in ``u``.
    """
    logp = np.asarray(logp, dtype=float)
    if np.any(logp >= 0.0) or np.any(~np.isfinite(logp)):
        raise QuantileError("log tail probability must be finite and negative")
    shallow = logp > -700.0
    u = np.empty_like(logp)
    u[shallow] = -ndtri(np.exp(logp[shallow]))
    deep = ~shallow
    if np.any(deep):
        # log Q(u) ~ -u^2/2 - log u - log sqrt(2 pi)
        t = -2.0 * (logp[deep] + _LOG_SQRT_2PI)
        u0 = np.sqrt(t - np.log(t))
        u[deep] = np.sqrt(t - 2.0 * np.log(u0))
    for _ in range(max_iter):
        lq = log_q(u)
        # d/du log Q(u) = -phi(u) / Q(u)
        step = (lq - logp) / np.exp(log_phi(u) - lq)
        u = u + step
        if np.all(np.abs(step) <= tol * np.maximum(1.0, np.abs(u))):
            return u
    raise QuantileError("upper-tail quantile inversion did not converge")
