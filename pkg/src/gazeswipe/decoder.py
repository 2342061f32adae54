"""Swipe-trace word decoding: template DTW, distance->probability, LM fusion.

A pruned gaze trace is matched against key-center template paths with
spatiotemporal DTW, distances are min-max normalized to [0, 1], fused with the
word n-gram probability as (p_ng + eps)^alpha * p_dist^(1 - alpha), and the
top-k candidates returned.  The temporal coordinate of both sequences is the
normalized rank in [0, temporal_weight], which keeps gaze seconds and template
indices dimensionally consistent; raw_timestamps restores timestamp-vs-index
matching for replay experiments.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace

import numpy as np

from .geometry import KeyboardLayout, LayoutError
from .lexicon import Lexicon, WordNgramModel, prefix_shortlist
from .trace_pipeline import GazeSample, PrunedTrace


class DecodeError(ValueError):
    pass


@dataclass(frozen=True)
class TemplateTrace:
    """Key-center path of a word; third coordinate is the 1-based letter index.

    Consecutive duplicate letters stay as repeated points so the time
    dimension can separate e.g. a two-letter from a three-letter word on the
    same keys.
    """

    word: str
    points: np.ndarray  # (len(word), 3)


@dataclass(frozen=True)
class CandidateScore:
    word: str
    dtw_distance: float
    p_dist: float
    p_ngram: float
    score: float


@dataclass(frozen=True)
class CandidateRanking:
    candidates: list[CandidateScore]
    latency_us: float
    n_considered: int
    fallback_used: bool = False

    def words(self) -> list[str]:
        return [c.word for c in self.candidates]


@dataclass(frozen=True)
class DecoderConfig:
    alpha: float = 0.05
    epsilon: float = 1e-8
    top_k: int = 4
    first_letter_radius_mm: float = 62.0  # one key pitch
    temporal_weight: float = 1.0
    use_time_dim: bool = True
    use_pruning: bool = True
    length_gate: bool = False
    fallback_shortlist: int = 20
    collapse_repeats: bool = False
    raw_timestamps: bool = False

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise DecodeError("alpha must be in [0, 1]")
        if self.epsilon <= 0:
            raise DecodeError("epsilon must be positive")
        if self.top_k < 1:
            raise DecodeError("top_k must be >= 1")


def template_trace(word: str, layout: KeyboardLayout) -> TemplateTrace:
    if not word:
        raise DecodeError("empty word has no template")
    centers = layout.normalize(np.array([layout.key_center(c) for c in word]))
    idx = np.arange(1, len(word) + 1, dtype=float)[:, None]
    return TemplateTrace(word, np.hstack([centers, idx]))


def _rank_tau(n: int) -> np.ndarray:
    if n <= 1:
        return np.zeros(n)
    return np.arange(n, dtype=float) / (n - 1)


def _with_tau(points: np.ndarray, temporal_weight: float, use_time_dim: bool, raw: bool) -> np.ndarray:
    """Replace the third coordinate per the configured temporal mode."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or len(pts) == 0:
        raise DecodeError("sequence must be a non-empty 2D array")
    out = np.zeros((len(pts), 3))
    out[:, :2] = pts[:, :2]
    if not use_time_dim:
        return out
    if raw:
        if pts.shape[1] < 3:
            raise DecodeError("raw_timestamps needs a third coordinate")
        out[:, 2] = pts[:, 2] * temporal_weight
    else:
        out[:, 2] = _rank_tau(len(pts)) * temporal_weight
    return out


def st_dtw(
    g: np.ndarray,
    q: np.ndarray,
    temporal_weight: float = 1.0,
    use_time_dim: bool = True,
    raw_timestamps: bool = False,
) -> float:
    """DTW cost with steps {(i-1,j), (i,j-1), (i-1,j-1)} and Euclidean points.

    Both sequences get the normalized-rank temporal coordinate (identical
    treatment); with use_time_dim off the third coordinate is zeroed.
    """
    a = _with_tau(g, temporal_weight, use_time_dim, raw_timestamps)
    b = _with_tau(q, temporal_weight, use_time_dim, raw_timestamps)
    cost = np.sqrt(((a[:, None, :] - b[None, :, :]) ** 2).sum(axis=2))
    n, m = cost.shape
    acc = np.full((n + 1, m + 1), np.inf)
    acc[0, 0] = 0.0
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            acc[i, j] = cost[i - 1, j - 1] + min(acc[i - 1, j], acc[i, j - 1], acc[i - 1, j - 1])
    return float(acc[n, m])


def _batch_dtw(g3: np.ndarray, q3: np.ndarray) -> np.ndarray:
    """DTW of one gaze sequence (n,3) against a stack of templates (W,m,3)."""
    cost = np.sqrt(((g3[None, :, None, :] - q3[:, None, :, :]) ** 2).sum(axis=3))  # (W,n,m)
    W, n, m = cost.shape
    prev = np.cumsum(cost[:, 0, :], axis=1)
    for i in range(1, n):
        curr = np.empty((W, m))
        curr[:, 0] = prev[:, 0] + cost[:, i, 0]
        for j in range(1, m):
            curr[:, j] = cost[:, i, j] + np.minimum(
                np.minimum(prev[:, j], prev[:, j - 1]), curr[:, j - 1]
            )
        prev = curr
    return prev[:, -1]


def filter_candidates(
    first_point_norm: np.ndarray,
    lexicon: Lexicon,
    layout: KeyboardLayout,
    radius_mm: float,
    trace_len: int | None = None,
    length_gate: bool = False,
) -> list[str]:
    """Words whose first letter's key center is within radius of the point.

    The point is the first pruned centroid in normalized units.  With the
    length gate on, words longer than 4*trace_len + 2 letters are dropped.
    """
    x_mm, y_mm = layout.denormalize(np.asarray(first_point_norm[:2]))
    letters = layout.letters_within(float(x_mm), float(y_mm), radius_mm)
    words = [w for letter in sorted(letters) for w in lexicon.words_starting_with(letter)]
    if length_gate and trace_len is not None:
        words = [w for w in words if len(w) <= length_gate_limit(trace_len)]
    return words


def length_gate_limit(trace_len: int) -> int:
    return 4 * trace_len + 2


def normalize_distances(deltas: np.ndarray) -> np.ndarray:
    """Linear map of DTW distances to [0, 1]; smallest distance -> 1.0."""
    d = np.asarray(deltas, dtype=float)
    if d.size == 0:
        raise DecodeError("need at least one candidate distance")
    d_min, d_max = d.min(), d.max()
    return 1.0 - (d - d_min) / ((d_max - d_min) + 1e-12)


def fuse(p_ng, p_dist, alpha: float, epsilon: float):
    """(p_ng + eps)^alpha * p_dist^(1-alpha); zero iff p_dist is zero (alpha<1)."""
    return (np.asarray(p_ng) + epsilon) ** alpha * np.asarray(p_dist) ** (1.0 - alpha)


def midswipe_alpha(alpha: float, n_points: int) -> float:
    """Adaptive fusion weight: n-gram worth 3x at one gaze point, 1x from three."""
    weight = max(1.0, 3.0 - (n_points - 1))
    return min(1.0, alpha * weight)


class _Group:
    __slots__ = ("words", "arr")

    def __init__(self, words: list[str], arr: np.ndarray):
        self.words = words
        self.arr = arr


class Decoder:
    """Candidate ranking over a fixed lexicon/layout/LM.

    Builds per-first-letter template stacks once so per-trace decoding is a
    handful of vectorized DTW sweeps; output is deterministic (score, then
    p_dist, then lexicographic).
    """

    def __init__(
        self,
        lexicon: Lexicon,
        word_model: WordNgramModel,
        layout: KeyboardLayout,
        config: DecoderConfig = DecoderConfig(),
    ):
        self.lexicon = lexicon
        self.word_model = word_model
        self.layout = layout
        self.config = config
        self._bank: dict[str, list[_Group]] = {}
        self._build_bank()

    def _template_points(self, word: str) -> np.ndarray:
        pts = template_trace(word, self.layout).points
        if self.config.collapse_repeats:
            keep = [0] + [i for i in range(1, len(word)) if word[i] != word[i - 1]]
            pts = pts[keep]
        return _with_tau(
            pts, self.config.temporal_weight, self.config.use_time_dim, self.config.raw_timestamps
        )

    def _build_bank(self) -> None:
        for letter, words in ((l, self.lexicon.words_starting_with(l)) for l in map(chr, range(97, 123))):
            by_len: dict[int, list[str]] = {}
            for w in words:
                try:
                    pts = self._template_points(w)
                except LayoutError:
                    continue  # word has letters the layout lacks
                by_len.setdefault(len(pts), []).append(w)
            groups = []
            for m in sorted(by_len):
                ws = by_len[m]
                arr = np.stack([self._template_points(w) for w in ws])
                groups.append(_Group(ws, arr))
            if groups:
                self._bank[letter] = groups

    # -- scoring ---------------------------------------------------------

    def _gaze_tau(self, points: np.ndarray) -> np.ndarray:
        cfg = self.config
        return _with_tau(points, cfg.temporal_weight, cfg.use_time_dim, cfg.raw_timestamps)

    def _candidate_groups(self, trace_pts: np.ndarray, context: tuple[str, ...]) -> tuple[list[_Group], bool]:
        cfg = self.config
        x_mm, y_mm = self.layout.denormalize(trace_pts[0, :2])
        letters = self.layout.letters_within(float(x_mm), float(y_mm), cfg.first_letter_radius_mm)
        groups: list[_Group] = []
        for letter in sorted(letters):
            groups.extend(self._bank.get(letter, ()))
        if cfg.length_gate:
            limit = length_gate_limit(len(trace_pts))
            gated = []
            for g in groups:
                keep = [i for i, w in enumerate(g.words) if len(w) <= limit]
                if keep:
                    gated.append(_Group([g.words[i] for i in keep], g.arr[keep]))
            groups = gated
        if groups:
            return groups, False
        shortlist = prefix_shortlist(
            self.lexicon, self.word_model, list(context), cfg.fallback_shortlist
        )
        by_len: dict[int, list[str]] = {}
        for w in shortlist:
            by_len.setdefault(len(self._template_points(w)), []).append(w)
        groups = [
            _Group(ws, np.stack([self._template_points(w) for w in ws]))
            for _, ws in sorted(by_len.items())
        ]
        return groups, True

    def _rank(
        self, trace_pts: np.ndarray, context: tuple[str, ...], alpha: float
    ) -> CandidateRanking:
        cfg = self.config
        t0 = time.perf_counter_ns()
        pts = np.asarray(trace_pts, dtype=float)
        if len(pts) == 0:
            raise DecodeError("empty trace")
        groups, fallback = self._candidate_groups(pts, context)
        if not groups:
            return CandidateRanking([], (time.perf_counter_ns() - t0) / 1000.0, 0, fallback)

        g3 = self._gaze_tau(pts)
        words: list[str] = []
        deltas: list[np.ndarray] = []
        for g in groups:
            words.extend(g.words)
            deltas.append(_batch_dtw(g3, g.arr))
        delta = np.concatenate(deltas)
        p_dist = normalize_distances(delta)
        p_ng = self.word_model.p_words(words, context)
        s = fuse(p_ng, p_dist, alpha, cfg.epsilon)

        order = np.lexsort((np.array(words), -p_dist, -s))[: cfg.top_k]
        cands = [
            CandidateScore(words[i], float(delta[i]), float(p_dist[i]), float(p_ng[i]), float(s[i]))
            for i in order
        ]
        return CandidateRanking(cands, (time.perf_counter_ns() - t0) / 1000.0, len(words), fallback)

    # -- public ops ------------------------------------------------------

    def decode(self, trace: PrunedTrace | np.ndarray, context: tuple[str, ...] = ()) -> CandidateRanking:
        pts = trace.points if isinstance(trace, PrunedTrace) else np.asarray(trace)
        return self._rank(pts, tuple(context), self.config.alpha)

    def decode_midswipe(self, trace: PrunedTrace | np.ndarray, context: tuple[str, ...] = ()) -> CandidateRanking:
        pts = trace.points if isinstance(trace, PrunedTrace) else np.asarray(trace)
        return self._rank(pts, tuple(context), midswipe_alpha(self.config.alpha, len(pts)))

    def decode_raw(self, samples: list[GazeSample], context: tuple[str, ...] = ()) -> CandidateRanking:
        """Ablation: DTW over every valid raw sample, no pruning."""
        pts = [(s.x_mm, s.y_mm, s.t) for s in samples if s.valid]
        if not pts:
            raise DecodeError("no valid samples")
        arr = np.array(pts)
        xy = self.layout.normalize(arr[:, :2])
        return self._rank(np.hstack([xy, arr[:, 2:]]), tuple(context), self.config.alpha)


def decode(
    trace: PrunedTrace | np.ndarray,
    context: tuple[str, ...],
    lexicon: Lexicon,
    word_model: WordNgramModel,
    layout: KeyboardLayout,
    config: DecoderConfig = DecoderConfig(),
) -> CandidateRanking:
    return Decoder(lexicon, word_model, layout, config).decode(trace, context)


def decode_midswipe(
    trace: PrunedTrace | np.ndarray,
    context: tuple[str, ...],
    lexicon: Lexicon,
    word_model: WordNgramModel,
    layout: KeyboardLayout,
    config: DecoderConfig = DecoderConfig(),
) -> CandidateRanking:
    return Decoder(lexicon, word_model, layout, config).decode_midswipe(trace, context)


def decode_raw_ablation(
    samples: list[GazeSample],
    context: tuple[str, ...],
    lexicon: Lexicon,
    word_model: WordNgramModel,
    layout: KeyboardLayout,
    config: DecoderConfig = DecoderConfig(),
) -> CandidateRanking:
    cfg = replace(config, use_pruning=False)
    return Decoder(lexicon, word_model, layout, cfg).decode_raw(samples, context)
