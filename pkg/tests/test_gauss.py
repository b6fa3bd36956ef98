import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, strategies as st

from tibrw.gauss import (QuantileError, log_expm1_neg, log_one_minus_exp, log_q,
                         upper_quantile_log)

DPS = 60


def _mp_log_q(u):
    with mp.workdps(DPS):
        return float(mp.log(mp.erfc(mp.mpf(u) / mp.sqrt(2)) / 2))


@pytest.mark.parametrize("u", [-5.0, 0.0, 1.0, 8.0, 40.0, 300.0, 1e4])
def test_log_q_against_mpmath(u):
    assert float(log_q(u)) == pytest.approx(_mp_log_q(u), rel=1e-12)


@pytest.mark.parametrize("logp", [-0.5, -3.0, -50.0, -699.0, -701.0, -5000.0, -1e6])
def test_quantile_inverts_log_q(logp):
    u = upper_quantile_log(logp)
    assert _mp_log_q(float(u)) == pytest.approx(logp, rel=1e-11, abs=1e-11)


def test_quantile_vectorised_and_monotone():
    lp = -np.logspace(-1, 5, 50)
    u = upper_quantile_log(lp)
    assert u.shape == lp.shape
    assert np.all(np.diff(u) > 0)


@pytest.mark.parametrize("bad", [0.0, 0.3, np.inf, np.nan])
def test_quantile_rejects(bad):
    with pytest.raises(QuantileError):
        upper_quantile_log(bad)


@given(st.floats(-700.0, 5.0))
def test_log_expm1_neg(logq):
    with mp.workdps(DPS):
        q = mp.exp(mp.mpf(logq))
        ref = float(mp.log(-mp.expm1(-q)) if q < 1 else mp.log1p(-mp.exp(-q)))
    assert float(log_expm1_neg(logq)) == pytest.approx(ref, rel=1e-10, abs=1e-300)


@given(st.floats(-500.0, -1e-12))
def test_log_one_minus_exp(x):
    with mp.workdps(DPS):
        ref = float(mp.log1p(-mp.exp(mp.mpf(x))))
    assert float(log_one_minus_exp(x)) == pytest.approx(ref, rel=1e-10, abs=1e-300)
