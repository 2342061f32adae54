import csv
import io
import math

import pytest
from hypothesis import given, strategies as st

from gazeswipe.metrics import (
    CSV_FIELDS,
    MetricsError,
    TrialRecord,
    classify_keystrokes,
    learning_rate,
    levenshtein,
    match_rates,
    summarize,
    swipe_efficiency,
    ter,
    trial_csv_rows,
    wpm,
)

from helpers import levenshtein_oracle


def test_wpm_exact_values():
    assert wpm(100, 60.0) == pytest.approx(20.0)
    assert wpm(25, 30.0) == pytest.approx(10.0)
    assert wpm(0, 10.0) == 0.0


def test_wpm_rejects_bad_duration():
    with pytest.raises(MetricsError):
        wpm(10, 0.0)
    with pytest.raises(MetricsError):
        wpm(10, -5.0)


def test_ter_exact_values():
    assert ter(95, 3, 2) == pytest.approx(0.05)
    assert ter(10, 0, 0) == 0.0
    assert ter(0, 5, 5) == 1.0


def test_ter_rejects_degenerate_input():
    with pytest.raises(MetricsError):
        ter(0, 0, 0)
    with pytest.raises(MetricsError):
        ter(-1, 0, 0)


def test_levenshtein_known_cases():
    assert levenshtein("kitten", "sitting") == 3
    assert levenshtein("", "abc") == 3
    assert levenshtein("abc", "") == 3
    assert levenshtein("same", "same") == 0


@given(st.text("abc", max_size=5), st.text("abc", max_size=5))
def test_levenshtein_matches_recursive_oracle(a, b):
    assert levenshtein(a, b) == levenshtein_oracle(a, b)


@given(st.text("ab", max_size=6), st.text("ab", max_size=6))
def test_levenshtein_symmetry_and_bounds(a, b):
    d = levenshtein(a, b)
    assert d == levenshtein(b, a)
    assert abs(len(a) - len(b)) <= d <= max(len(a), len(b))


def test_classify_keystrokes():
    assert classify_keystrokes("the cat", "the cat", 0) == (7, 0, 0)
    assert classify_keystrokes("quick", "quack", 2) == (4, 2, 1)
    assert classify_keystrokes("abc", "", 3) == (0, 3, 3)
    with pytest.raises(MetricsError):
        classify_keystrokes("a", "a", -1)


def test_match_rates_hand_count():
    rates = match_rates([1, 2, None, 4, 9], top_k=4)
    assert rates["first_match"] == pytest.approx(0.2)
    assert rates["any_match"] == pytest.approx(0.6)
    assert rates["all_miss"] == pytest.approx(0.4)


def test_match_rates_empty_rejected():
    with pytest.raises(MetricsError):
        match_rates([])


@given(st.lists(st.one_of(st.none(), st.integers(1, 10)), min_size=1, max_size=50))
def test_match_rate_identities(ranks):
    rates = match_rates(ranks, top_k=4)
    assert 0.0 <= rates["first_match"] <= rates["any_match"] <= 1.0
    assert rates["any_match"] + rates["all_miss"] == pytest.approx(1.0)


def test_learning_rate_exact_slope():
    assert learning_rate([10.0, 12.0, 14.0]) == pytest.approx(2.0)
    assert learning_rate([14.0, 12.0, 10.0]) == pytest.approx(-2.0)
    assert learning_rate([5.0, 5.0]) == pytest.approx(0.0)
    with pytest.raises(MetricsError):
        learning_rate([5.0])


def test_swipe_efficiency():
    assert swipe_efficiency(5, 3) == pytest.approx(5.0 / 3.0)
    with pytest.raises(MetricsError):
        swipe_efficiency(5, 0)


def test_trial_record_consistency():
    t = TrialRecord("t1", "hello world", "hello world", duration_s=16.5, erased_chars=2)
    assert t.wpm() == pytest.approx(wpm(11, 16.5))
    c, if_, inf = t.keystrokes()
    assert (c, if_, inf) == (11, 2, 0)
    assert t.ter() == pytest.approx(2 / 13)


def test_trial_csv_rows_parse_back():
    trials = [
        TrialRecord("t1", "ab", "ab", 4.0, candidate_ranks=[1]),
        TrialRecord("t2", "cd", "ce", 8.0, erased_chars=1, candidate_ranks=[None]),
    ]
    text = trial_csv_rows(trials)
    rows = list(csv.DictReader(io.StringIO(text)))
    assert [r["trial_id"] for r in rows] == ["t1", "t2"]
    assert tuple(rows[0]) == CSV_FIELDS
    assert float(rows[0]["wpm"]) == pytest.approx(wpm(2, 4.0))
    assert float(rows[1]["any_match"]) == pytest.approx(0.0)


def test_trial_csv_nan_when_no_swipes():
    text = trial_csv_rows([TrialRecord("t1", "ab", "ab", 4.0)])
    row = next(csv.DictReader(io.StringIO(text)))
    assert math.isnan(float(row["first_match"]))


def test_summarize_aggregates():
    trials = [
        TrialRecord(
            "t1", "abcde", "abcde", 6.0,
            candidate_ranks=[1, 2], pruned_point_counts=[3], word_lengths=[5],
        ),
        TrialRecord("t2", "abcde", "abcde", 12.0, candidate_ranks=[None]),
    ]
    out = summarize(trials)
    assert out["trials"] == 2.0
    assert out["mean_wpm"] == pytest.approx((wpm(5, 6.0) + wpm(5, 12.0)) / 2)
    assert out["first_match"] == pytest.approx(1 / 3)
    assert out["any_match"] == pytest.approx(2 / 3)
    assert out["mean_swipe_efficiency"] == pytest.approx(5.0 / 3.0)
    with pytest.raises(MetricsError):
        summarize([])
