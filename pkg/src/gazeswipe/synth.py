"""Synthetic gaze-swipe generator: template paths sampled at sensor rate.

A trace alternates fixation dwells on each letter of the word with constant
angular-speed saccades between them.  Noise knobs: per-fixation landing
offset (Gaussian, in key widths), per-sample tremor inside a fixation, and a
whole-trace calibration-drift offset applied to a random fraction of traces.
With every knob at zero, all samples lie exactly on the template polyline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dataio import TraceRecord
from .geometry import KeyboardLayout
from .lexicon import Lexicon
from .trace_pipeline import GazeSample, PrunedTrace


@dataclass(frozen=True)
class SynthConfig:
    sample_rate_hz: float = 200.0
    dwell_ms: float = 250.0
    dwell_jitter_frac: float = 0.2  # uniform +- fraction of dwell per fixation
    saccade_speed_deg_s: float = 300.0
    jitter_sigma_keyw: float = 0.0  # per-fixation landing offset, in key widths
    tremor_sigma_mm: float = 0.0  # per-sample scatter inside a fixation
    drift_mm: float = 0.0  # calibration-drift magnitude
    drift_fraction: float = 0.0  # fraction of traces that get the drift

    def __post_init__(self):
        if self.sample_rate_hz <= 0 or self.dwell_ms <= 0 or self.saccade_speed_deg_s <= 0:
            raise ValueError("rate, dwell and saccade speed must be positive")
        if min(self.jitter_sigma_keyw, self.tremor_sigma_mm, self.drift_mm) < 0:
            raise ValueError("noise magnitudes must be non-negative")
        if not 0.0 <= self.drift_fraction <= 1.0:
            raise ValueError("drift_fraction must be in [0, 1]")
        if not 0.0 <= self.dwell_jitter_frac < 1.0:
            raise ValueError("dwell_jitter_frac must be in [0, 1)")


def synth_trace(
    word: str,
    layout: KeyboardLayout,
    config: SynthConfig,
    rng: np.random.Generator,
    record_id: str = "synth-000000",
    context: str = "",
) -> TraceRecord:
    """One 200 Hz-style trace following the word's key centers."""
    centers = np.array([layout.key_center(c) for c in word], dtype=float)
    key_w = layout.key(word[0]).w_mm
    sigma = config.jitter_sigma_keyw * key_w
    landings = centers + rng.normal(0.0, sigma, size=centers.shape) if sigma > 0 else centers

    drifted = config.drift_mm > 0 and rng.random() < config.drift_fraction
    if drifted:
        theta = rng.uniform(0.0, 2.0 * math.pi)
        landings = landings + config.drift_mm * np.array([math.cos(theta), math.sin(theta)])

    # Segment list: (duration_s, kind, start_xy, end_xy); fixations get tremor.
    segments: list[tuple[float, str, np.ndarray, np.ndarray]] = []
    for i, pos in enumerate(landings):
        frac = config.dwell_jitter_frac
        mult = 1.0 + (rng.uniform(-frac, frac) if frac > 0 else 0.0)
        dwell = (config.dwell_ms / 1000.0) * mult
        segments.append((dwell, "fix", pos, pos))
        if i + 1 < len(landings):
            dist_mm = float(np.linalg.norm(landings[i + 1] - pos))
            if dist_mm > 0:
                ang = layout.visual_angle_deg(dist_mm)
                segments.append((ang / config.saccade_speed_deg_s, "sac", pos, landings[i + 1]))

    total = sum(d for d, *_ in segments)
    dt = 1.0 / config.sample_rate_hz
    n = max(2, int(math.floor(total / dt)) + 1)
    times = np.arange(n) * dt

    starts = np.cumsum([0.0] + [d for d, *_ in segments])[:-1]
    samples: list[GazeSample] = []
    for t in times:
        k = int(np.searchsorted(starts, min(t, total - 1e-9), side="right") - 1)
        dur, kind, a, b = segments[k]
        u = (t - starts[k]) / dur if dur > 0 else 0.0
        pos = a + min(u, 1.0) * (b - a)
        if kind == "fix" and config.tremor_sigma_mm > 0:
            pos = pos + rng.normal(0.0, config.tremor_sigma_mm, size=2)
        samples.append(GazeSample(float(t), float(pos[0]), float(pos[1])))

    return TraceRecord(
        record_id=record_id,
        technique="synthetic",
        word=word,
        samples=samples,
        context=context,
        meta={"drifted": drifted},
    )


def synth_keypoints(
    word: str,
    layout: KeyboardLayout,
    rng: np.random.Generator | None = None,
    jitter_sigma_mm: float = 0.0,
    drift_mm: float = 0.0,
    drift_fraction: float = 0.0,
    point_gap_s: float = 0.3,
) -> PrunedTrace:
    """One already-pruned trace: the word's key centers, one point per letter.

    Skips the sensor-rate and clustering stages entirely, so consecutive
    duplicate letters stay distinct points and noise is applied per point.
    Useful for benchmarking the matcher in isolation.
    """
    if rng is None:
        rng = np.random.default_rng(0)
    pts = np.array([layout.key_center(c) for c in word], dtype=float)
    if jitter_sigma_mm > 0:
        pts = pts + rng.normal(0.0, jitter_sigma_mm, size=pts.shape)
    if drift_mm > 0 and rng.random() < drift_fraction:
        theta = rng.uniform(0.0, 2.0 * math.pi)
        pts = pts + drift_mm * np.array([math.cos(theta), math.sin(theta)])
    t = np.arange(len(pts), dtype=float) * point_gap_s
    points = np.column_stack([layout.normalize(pts), t])
    return PrunedTrace(points=points, source_count=len(pts))


def sample_words(lexicon: Lexicon, n: int, rng: np.random.Generator) -> list[str]:
    """Draw n words with probability proportional to lexicon counts."""
    words = lexicon.words()
    counts = np.array([lexicon.count(w) for w in words], dtype=float)
    idx = rng.choice(len(words), size=n, p=counts / counts.sum())
    return [words[i] for i in idx]


def synth_traces(
    lexicon: Lexicon,
    layout: KeyboardLayout,
    config: SynthConfig,
    n: int,
    seed: int = 0,
) -> list[TraceRecord]:
    """n frequency-weighted traces, fully determined by the seed."""
    rng = np.random.default_rng(seed)
    words = sample_words(lexicon, n, rng)
    return [
        synth_trace(w, layout, config, rng, record_id=f"synth-{i:06d}")
        for i, w in enumerate(words)
    ]
