import numpy as np
import pytest

from tibrw.rng import chunks, run_trials, trial_stream, uniforms


def test_streams_are_reproducible_and_distinct():
    a = trial_stream(7, 3).standard_normal(5)
    np.testing.assert_array_equal(a, trial_stream(7, 3).standard_normal(5))
    assert not np.array_equal(a, trial_stream(7, 4).standard_normal(5))
    assert not np.array_equal(a, trial_stream(8, 3).standard_normal(5))


def test_thread_count_does_not_change_results():
    f = lambda g: g.standard_normal(3).sum()
    assert run_trials(f, 11, 40, threads=1) == run_trials(f, 11, 40, threads=4)
    assert run_trials(f, 11, 40)[5] == f(trial_stream(11, 5))


def test_uniforms_look_uniform():
    u = uniforms(0, 4000)
    assert 0 <= u.min() and u.max() < 1
    assert abs(u.mean() - 0.5) < 4 * np.sqrt(1 / 12 / 4000)


def test_negative_seed():
    with pytest.raises(ValueError):
        trial_stream(-1, 0)


def test_chunks():
    assert chunks(10, 4) == [4, 4, 2]
    assert chunks(0, 4) == []
