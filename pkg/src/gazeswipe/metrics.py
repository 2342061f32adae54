"""Text-entry evaluation measures: WPM, total error rate, keystroke taxonomy,
candidate match rates, learning-rate slope, swipe efficiency.

Keystroke classes follow the standard transcription-study taxonomy: INF is
the minimum string distance between presented and final transcribed text,
IF counts characters that were entered and later erased, and C is whatever
productive input remains.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np


class MetricsError(ValueError):
    pass


def wpm(transcribed_chars: int, duration_s: float) -> float:
    """Words per minute with a word normalized to five characters."""
    if duration_s <= 0:
        raise MetricsError("duration must be positive")
    return (transcribed_chars / 5.0) / (duration_s / 60.0)


def ter(c: int, inc_fixed: int, inc_not_fixed: int) -> float:
    """Total error rate (IF + INF) / (C + IF + INF)."""
    if min(c, inc_fixed, inc_not_fixed) < 0:
        raise MetricsError("keystroke counts must be non-negative")
    denom = c + inc_fixed + inc_not_fixed
    if denom == 0:
        raise MetricsError("no keystrokes to grade")
    return (inc_fixed + inc_not_fixed) / denom


def levenshtein(a: str, b: str) -> int:
    """Unit-cost edit distance (insert/delete/substitute)."""
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i]
        for j, cb in enumerate(b, start=1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def classify_keystrokes(presented: str, transcribed: str, erased_chars: int) -> tuple[int, int, int]:
    """(C, IF, INF) from the final strings plus the erased-character count.

    INF = edit distance between presented and transcribed; IF = characters
    consumed by deletion; C = remaining productive characters.
    """
    if erased_chars < 0:
        raise MetricsError("erased_chars must be non-negative")
    inf = levenshtein(presented, transcribed)
    c = max(len(presented), len(transcribed)) - inf
    return c, erased_chars, inf


def match_rates(ranks: list[int | None], top_k: int = 4) -> dict[str, float]:
    """first_match / any_match / all_miss fractions over per-swipe ranks.

    rank is 1-based position of the intended word in the shown candidates,
    or None for a miss.
    """
    if not ranks:
        raise MetricsError("need at least one swipe outcome")
    n = len(ranks)
    first = sum(1 for r in ranks if r == 1) / n
    any_ = sum(1 for r in ranks if r is not None and r <= top_k) / n
    return {"first_match": first, "any_match": any_, "all_miss": 1.0 - any_}


def learning_rate(session_wpm: list[float]) -> float:
    """OLS slope of WPM over session index (1, 2, ...).

    Closed form rather than a polynomial fit so exact-slope inputs come out
    exact instead of within an SVD rounding error.
    """
    if len(session_wpm) < 2:
        raise MetricsError("need at least two sessions")
    x = np.arange(1, len(session_wpm) + 1, dtype=float)
    y = np.asarray(session_wpm, dtype=float)
    dx = x - x.mean()
    return float(dx @ (y - y.mean()) / (dx @ dx))


def swipe_efficiency(word_len_chars: int, pruned_point_count: int) -> float:
    """Characters produced per pruned trace point."""
    if pruned_point_count < 1:
        raise MetricsError("need at least one pruned point")
    return word_len_chars / pruned_point_count


@dataclass
class TrialRecord:
    """One presented phrase worth of bookkeeping for the study metrics."""

    trial_id: str
    presented: str
    transcribed: str
    duration_s: float
    erased_chars: int = 0
    candidate_ranks: list[int | None] = field(default_factory=list)
    pruned_point_counts: list[int] = field(default_factory=list)
    word_lengths: list[int] = field(default_factory=list)

    def keystrokes(self) -> tuple[int, int, int]:
        return classify_keystrokes(self.presented, self.transcribed, self.erased_chars)

    def wpm(self) -> float:
        return wpm(len(self.transcribed), self.duration_s)

    def ter(self) -> float:
        return ter(*self.keystrokes())


CSV_FIELDS = ("trial_id", "wpm", "ter", "first_match", "any_match", "duration_s")


def trial_csv_rows(trials: list[TrialRecord], top_k: int = 4) -> str:
    """Per-trial CSV (header + one row per trial)."""
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    for t in trials:
        rates = (
            match_rates(t.candidate_ranks, top_k)
            if t.candidate_ranks
            else {"first_match": float("nan"), "any_match": float("nan")}
        )
        writer.writerow(
            {
                "trial_id": t.trial_id,
                "wpm": f"{t.wpm():.4f}",
                "ter": f"{t.ter():.6f}",
                "first_match": f"{rates['first_match']:.4f}",
                "any_match": f"{rates['any_match']:.4f}",
                "duration_s": f"{t.duration_s:.4f}",
            }
        )
    return buf.getvalue()


def summarize(trials: list[TrialRecord], top_k: int = 4) -> dict[str, float]:
    """Aggregate WPM/TER/match rates across trials."""
    if not trials:
        raise MetricsError("no trials")
    ranks = [r for t in trials for r in t.candidate_ranks]
    out = {
        "trials": float(len(trials)),
        "mean_wpm": float(np.mean([t.wpm() for t in trials])),
        "mean_ter": float(np.mean([t.ter() for t in trials])),
    }
    if ranks:
        out.update(match_rates(ranks, top_k))
    effs = [
        swipe_efficiency(w, p)
        for t in trials
        for w, p in zip(t.word_lengths, t.pruned_point_counts)
        if p >= 1
    ]
    if effs:
        out["mean_swipe_efficiency"] = float(np.mean(effs))
    return out
