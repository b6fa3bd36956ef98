import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from tibrw.env import ProfileError, Regime, VarianceProfile, classify, variance_at


def test_variance_at_two_phase(inc):
    assert variance_at(inc, 0, 4) == 1.0
    assert variance_at(inc, 1, 4) == 1.0
    assert variance_at(inc, 2, 4) == 4.0
    assert variance_at(inc, 3, 4) == 4.0


@pytest.mark.parametrize("step", [0, 3, 9])
def test_variance_at_homogeneous(step):
    assert variance_at(VarianceProfile.homogeneous(2.5), step, 10) == 2.5


@pytest.mark.parametrize("step", [-1, 4])
def test_variance_at_out_of_range(inc, step):
    with pytest.raises(ProfileError):
        variance_at(inc, step, 4)


def test_incompatible_n(inc):
    with pytest.raises(ProfileError):
        variance_at(inc, 0, 5)
    assert not VarianceProfile((1 / 3, 2 / 3), (1, 2)).is_compatible(4)
    assert VarianceProfile((1 / 3, 2 / 3), (1, 2)).is_compatible(6)


@pytest.mark.parametrize("fr, va", [
    ((0.5, 0.4), (1, 2)),      # does not sum to 1
    ((0.5, 0.5), (1, 0)),      # zero variance
    ((0.5, 0.5), (1, -2)),
    ((), ()),
    ((1.0,), (1, 2)),
])
def test_invalid_profiles(fr, va):
    with pytest.raises(ProfileError):
        VarianceProfile(fr, va)


def test_classify_examples():
    assert classify(VarianceProfile.two_phase(1, 4)) is Regime.INCREASING
    assert classify(VarianceProfile.two_phase(4, 1)) is Regime.DECREASING
    assert classify(VarianceProfile((1 / 3, 1 / 3, 1 / 3), (1, 4, 2))) is Regime.GENERAL
    assert classify(VarianceProfile.homogeneous(3)) is Regime.HOMOGENEOUS
    assert classify(VarianceProfile.two_phase(2, 2 * (1 + 1e-14))) is Regime.HOMOGENEOUS
    assert classify(VarianceProfile.two_phase(2, 2 * (1 + 1e-9))) is Regime.INCREASING


def test_json_roundtrip(tmp_path):
    spec = '[{"t": 0.5, "var": 1.0}, {"t": 0.5, "var": 4.0}]'
    p = VarianceProfile.from_json(spec)
    assert p == VarianceProfile.two_phase(1, 4)
    f = tmp_path / "p.json"
    f.write_text(json.dumps(p.to_json()))
    assert VarianceProfile.from_json(str(f)) == p
    with pytest.raises(ProfileError):
        VarianceProfile.from_json('[{"t": 1.0}]')


variances = st.lists(st.floats(0.05, 20.0), min_size=1, max_size=5)


@given(variances)
def test_variance_at_piecewise_and_total(vs):
    k = len(vs)
    p = VarianceProfile(tuple([1.0 / k] * k), tuple(vs))
    n = 6 * k
    per_step = [variance_at(p, j, n) for j in range(n)]
    for seg in range(k):
        assert per_step[6 * seg: 6 * seg + 6] == [vs[seg]] * 6
    assert np.isclose(sum(per_step), p.total_variance(n), rtol=1e-12)
    np.testing.assert_array_equal(p.step_variances(n), per_step)


@given(st.lists(st.floats(0.05, 20.0), min_size=2, max_size=5, unique=True))
def test_reversal_swaps_monotone_regimes(vs):
    vs = sorted(vs)
    k = len(vs)
    p = VarianceProfile(tuple([1.0 / k] * k), tuple(vs))
    expected = classify(p)
    if expected is Regime.INCREASING:
        assert classify(p.reversed()) is Regime.DECREASING
        assert classify(p.reversed().reversed()) is Regime.INCREASING
