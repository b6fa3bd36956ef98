import math

import mpmath as mp
import pytest
from hypothesis import given, strategies as st

from tibrw.env import VarianceProfile
from tibrw.theory import (Model, RegimeMismatch, SQRT_2LOG2, evaluate_centering,
                          predict)

mp.mp.dps = 30
L2 = mp.log(2)
# high-precision reference values
HOM_V = float(mp.sqrt(2 * L2))                     # 1.1774100225154747
HOM_B = float(mp.mpf(3) / 2 / mp.sqrt(2 * L2))     # 1.2739827004320286
INC_V = float(mp.sqrt(5 * L2))                     # 1.8616487055295171
INC_B = float(mp.sqrt(5) / (4 * mp.sqrt(L2)))      # 0.6714478388361981
DEC_V = float(mp.mpf(3) / 2 * mp.sqrt(2 * L2))     # 1.7661150337732120
DEC_B = float(9 / (2 * mp.sqrt(2 * L2)))           # 3.8219481012960857


def test_reference_values():
    assert HOM_V == pytest.approx(1.1774100, abs=1e-7)
    assert INC_V == pytest.approx(1.8616487, abs=1e-7)
    assert INC_B == pytest.approx(0.6714479, abs=1e-7)
    assert DEC_V == pytest.approx(1.7661150, abs=1e-7)


@pytest.mark.parametrize("profile, model, v, b", [
    (VarianceProfile.homogeneous(1.0), "homogeneous", HOM_V, HOM_B),
    (VarianceProfile.two_phase(1, 4), "increasing", INC_V, INC_B),
    (VarianceProfile.two_phase(4, 1), "decreasing", DEC_V, DEC_B),
    (VarianceProfile.two_phase(4, 1), "greedy", DEC_V, DEC_B),
    (VarianceProfile.two_phase(1, 4), "independent", INC_V, INC_B),
])
def test_predict_examples(profile, model, v, b):
    p = predict(profile, model)
    assert p.velocity == pytest.approx(v, abs=1e-13)
    assert p.log_coeff == pytest.approx(b, abs=1e-13)


def test_named_betas():
    assert predict(VarianceProfile.homogeneous(2), "homogeneous").beta == 1.5
    assert predict(VarianceProfile.two_phase(1, 4), "increasing").beta == 0.5
    assert predict(VarianceProfile.two_phase(4, 1), "decreasing").beta == pytest.approx(3.0, abs=1e-12)
    d = predict(VarianceProfile.two_phase(4, 1), "decreasing")
    assert d.sigma_eff == pytest.approx(1.5)


@pytest.mark.parametrize("profile, model", [
    (VarianceProfile.two_phase(4, 1), "increasing"),
    (VarianceProfile.two_phase(1, 4), "decreasing"),
    (VarianceProfile.two_phase(1, 4), "homogeneous"),
    (VarianceProfile((1 / 3, 1 / 3, 1 / 3), (1, 4, 2)), "increasing"),
])
def test_regime_mismatch(profile, model):
    with pytest.raises(RegimeMismatch):
        predict(profile, model)


def test_k_phase_formulas():
    t = (0.2, 0.3, 0.5)
    inc = VarianceProfile(t, (1.0, 2.0, 5.0))
    p = predict(inc, "increasing")
    s2 = 0.2 * 1 + 0.3 * 2 + 0.5 * 5
    assert p.velocity == pytest.approx(math.sqrt(2 * math.log(2) * s2), rel=1e-14)
    assert p.log_coeff == pytest.approx(0.5 * math.sqrt(s2) / SQRT_2LOG2, rel=1e-14)
    dec = VarianceProfile(t, (5.0, 2.0, 1.0))
    q = predict(dec, "decreasing")
    sig = [math.sqrt(v) for v in (5.0, 2.0, 1.0)]
    assert q.velocity == pytest.approx(SQRT_2LOG2 * sum(a * b for a, b in zip(t, sig)), rel=1e-14)
    assert q.log_coeff == pytest.approx(1.5 * sum(sig) / SQRT_2LOG2, rel=1e-14)
    # equal thirds: beta = 3/2 * k
    eq = VarianceProfile((1 / 3,) * 3, (5.0, 2.0, 1.0))
    assert predict(eq, "decreasing").beta == pytest.approx(4.5, rel=1e-12)


def test_centering():
    p = predict(VarianceProfile.two_phase(1, 4), "increasing")
    assert evaluate_centering(p, math.e) == pytest.approx(p.velocity * math.e - p.log_coeff, abs=1e-12)
    h = predict(VarianceProfile.homogeneous(1), "homogeneous")
    ref = float(100 * mp.sqrt(2 * L2) - mp.mpf(3) / 2 / mp.sqrt(2 * L2) * mp.log(100))
    assert evaluate_centering(h, 100) == pytest.approx(ref, abs=1e-10)
    assert ref == pytest.approx(111.8741, abs=1e-4)
    assert evaluate_centering(h, 2) == pytest.approx(2 * h.velocity - h.log_coeff * math.log(2))
    with pytest.raises(ValueError):
        evaluate_centering(h, 1)


sig = st.floats(0.1, 10.0)


@given(sig)
def test_leading_term_continuity(s):
    prof = VarianceProfile.two_phase(s * s, s * s)
    vs = [predict(prof, m, check_regime=False).velocity for m in Model]
    for v in vs:
        assert v == pytest.approx(SQRT_2LOG2 * s, rel=1e-12)


@given(sig)
def test_log_correction_phase_transition(s):
    prof = VarianceProfile.two_phase(s * s, s * s)
    ind = predict(prof, "independent").log_coeff
    hom = predict(prof, "homogeneous").log_coeff
    dec = predict(prof, "decreasing", check_regime=False).log_coeff
    assert ind < hom < dec
    assert predict(prof, "decreasing", check_regime=False).beta == pytest.approx(3.0)


@given(sig, sig)
def test_increasing_beats_reversed_decreasing(a, b):
    lo, hi = sorted((a, b))
    if hi - lo < 1e-3:
        return
    up = predict(VarianceProfile.two_phase(lo * lo, hi * hi), "increasing").velocity
    down = predict(VarianceProfile.two_phase(hi * hi, lo * lo), "decreasing").velocity
    assert up > down


@given(st.lists(st.floats(0.1, 10.0), min_size=1, max_size=4))
def test_greedy_is_sum_of_homogeneous_segments(vs):
    k = len(vs)
    prof = VarianceProfile((1.0 / k,) * k, tuple(vs))
    g = predict(prof, "greedy")
    parts = [predict(VarianceProfile.homogeneous(v), "homogeneous") for v in vs]
    assert g.velocity == pytest.approx(sum(p.velocity for p in parts) / k, rel=1e-12)
    assert g.log_coeff == pytest.approx(sum(p.log_coeff for p in parts), rel=1e-12)


@given(st.lists(st.floats(0.1, 10.0), min_size=1, max_size=4), st.sampled_from(list(Model)))
def test_prediction_invariants(vs, model):
    k = len(vs)
    prof = VarianceProfile((1.0 / k,) * k, tuple(vs))
    p = predict(prof, model, check_regime=False)
    assert p.velocity == pytest.approx(SQRT_2LOG2 * p.sigma_eff, abs=1e-12)
    assert p.log_coeff == pytest.approx(p.beta * p.sigma_eff / SQRT_2LOG2, abs=1e-12)
    assert p.velocity > 0 and p.sigma_eff > 0
