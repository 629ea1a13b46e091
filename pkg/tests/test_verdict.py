import numpy as np
import pytest

from weightlab.verdict import (Trend, Verdict, bounded_trend, combine, diverges_trend,
                               tail_windows, window_shift)


def test_windows_cover_the_tail():
    w1, w2 = tail_windows(64)
    assert (w1.start, w1.stop, w2.start, w2.stop) == (32, 48, 48, 65)


def test_windows_reject_short_input():
    with pytest.raises(ValueError):
        tail_windows(5)


def test_bounded_constant_holds():
    assert bounded_trend(np.ones(65)) is Trend.HOLDS


def test_linear_growth_fails():
    assert bounded_trend(np.arange(65.0)) is Trend.FAILS
    assert diverges_trend(np.arange(65.0)) is Trend.HOLDS


def test_oscillation_is_inconclusive():
    # max rises, min does not
    stat = np.where(np.arange(65) % 2 == 0, np.arange(65.0), 0.0)
    assert bounded_trend(stat) is Trend.INCONCLUSIVE
    assert diverges_trend(stat) is Trend.INCONCLUSIVE


def test_slow_rise_below_tol_holds():
    stat = 0.001 * np.arange(65.0)
    dmax, _ = window_shift(stat)
    assert dmax < 0.05
    assert bounded_trend(stat) is Trend.HOLDS


def test_non_finite_entries_ignored():
    stat = np.ones(65)
    stat[40] = -np.inf
    assert bounded_trend(stat) is Trend.HOLDS


def test_combine_precedence():
    assert combine(["holds", "inconclusive"]) is Trend.INCONCLUSIVE
    assert combine(["holds", "inconclusive", "fails"]) is Trend.FAILS
    assert combine([]) is Trend.HOLDS


def test_failing_verdict_requires_witness():
    with pytest.raises(ValueError):
        Verdict(False, Trend.FAILS)


def test_verdict_round_trip():
    v = Verdict(False, "fails", np.float64(1.5), (np.int64(3), 4), "note", {"a": 1})
    back = Verdict.from_dict(v.to_dict())
    assert back == v
    assert type(back.witness[0]) is int
