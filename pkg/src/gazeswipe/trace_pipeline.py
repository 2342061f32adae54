"""Raw 200 Hz gaze stream -> short ordered centroid sequence.

Two-stage reduction: velocity-threshold fixation labeling drops saccade
samples, then density clustering collapses each fixation (and revisits close
in space-time) to a single centroid.  Everything here is a pure function over
input buffers.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import KeyboardLayout


class TraceError(ValueError):
    """Degenerate input: zero valid samples, non-increasing time, etc."""


class SampleLabel(enum.Enum):
    FIXATION = "fixation"
    SACCADE = "saccade"
    UNDEFINED = "undefined"


@dataclass(frozen=True)
class GazeSample:
    """One timestamped eye-tracking hit on the keyboard plane (mm)."""

    t: float
    x_mm: float
    y_mm: float
    gaze_dir: tuple[float, float, float] | None = None
    valid: bool = True


@dataclass(frozen=True)
class LabeledSample:
    sample: GazeSample
    label: SampleLabel


@dataclass(frozen=True)
class PrunedTrace:
    """Time-ordered (x_norm, y_norm, t_s) centroids plus the raw count in."""

    points: np.ndarray  # (k, 3)
    source_count: int

    def __len__(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class PipelineConfig:
    ivt_threshold_deg_s: float = 100.0
    dbscan_eps: float = 0.10  # normalized keyboard units
    dbscan_min_pts: int = 3
    time_scale: float = 0.10  # normalized units per second on the time axis

    def __post_init__(self):
        if min(self.ivt_threshold_deg_s, self.dbscan_eps, self.time_scale) <= 0:
            raise ValueError("pipeline parameters must be positive")
        if self.dbscan_min_pts < 1:
            raise ValueError("dbscan_min_pts must be >= 1")


def angular_velocity(prev: GazeSample, cur: GazeSample, layout: KeyboardLayout) -> float:
    """Angular velocity in deg/s between two valid samples.

    Uses the 3D gaze vectors when both samples carry them; otherwise falls
    back to the angle subtended at an eye point viewing_distance_mm in front
    of the keyboard center.
    """
    dt = cur.t - prev.t
    if dt <= 0:
        raise TraceError(f"non-increasing timestamps: {prev.t} -> {cur.t}")
    if prev.gaze_dir is not None and cur.gaze_dir is not None:
        v1 = np.asarray(prev.gaze_dir, dtype=float)
        v2 = np.asarray(cur.gaze_dir, dtype=float)
        cosang = float(np.dot(v1, v2) / (np.linalg.norm(v1) * np.linalg.norm(v2)))
    else:
        cx, cy = layout.center_mm
        d = layout.viewing_distance_mm
        v1 = np.array([prev.x_mm - cx, prev.y_mm - cy, d])
        v2 = np.array([cur.x_mm - cx, cur.y_mm - cy, d])
        cosang = float(np.dot(v1, v2) / (np.linalg.norm(v1) * np.linalg.norm(v2)))
    angle = math.degrees(math.acos(min(1.0, max(-1.0, cosang))))
    return angle / dt


def ivt_label(
    samples: list[GazeSample], config: PipelineConfig, layout: KeyboardLayout
) -> list[LabeledSample]:
    """Label each sample fixation/saccade by velocity against the previous one.

    The first sample has no predecessor and is labeled undefined, as is any
    sample where it or its predecessor is invalid.
    """
    out: list[LabeledSample] = []
    for i, cur in enumerate(samples):
        if i == 0 or not cur.valid or not samples[i - 1].valid:
            out.append(LabeledSample(cur, SampleLabel.UNDEFINED))
            continue
        v = angular_velocity(samples[i - 1], cur, layout)
        label = SampleLabel.FIXATION if v < config.ivt_threshold_deg_s else SampleLabel.SACCADE
        out.append(LabeledSample(cur, label))
    return out


def dbscan_labels(points: np.ndarray, eps: float, min_pts: int) -> np.ndarray:
    """Plain DBSCAN cluster labels (0..k-1; -1 = noise) on pre-scaled points.

    Region-growing over the eps-neighborhood graph; core points have at least
    min_pts neighbors (the point itself counts).
    """
    pts = np.asarray(points, dtype=float)
    n = len(pts)
    if n == 0:
        return np.empty(0, dtype=int)
    diffs = pts[:, None, :] - pts[None, :, :]
    within = (diffs**2).sum(axis=2) <= eps * eps
    n_neighbors = within.sum(axis=1)
    core = n_neighbors >= min_pts

    labels = np.full(n, -1, dtype=int)
    cluster = 0
    for seed in range(n):
        if labels[seed] != -1 or not core[seed]:
            continue
        stack = [seed]
        labels[seed] = cluster
        while stack:
            p = stack.pop()
            if not core[p]:
                continue
            for q in np.nonzero(within[p])[0]:
                if labels[q] == -1:
                    labels[q] = cluster
                    stack.append(int(q))
        cluster += 1
    return labels


def dbscan_reduce(points_xyt: np.ndarray, config: PipelineConfig) -> np.ndarray:
    """Cluster (x_norm, y_norm, t_s) points and keep time-ordered centroids.

    The time axis is scaled by time_scale before the distance computation;
    centroids are unscaled cluster means.  Noise points are discarded.
    """
    pts = np.asarray(points_xyt, dtype=float).reshape(-1, 3)
    if len(pts) == 0:
        return np.empty((0, 3))
    scaled = pts.copy()
    scaled[:, 2] *= config.time_scale
    labels = dbscan_labels(scaled, config.dbscan_eps, config.dbscan_min_pts)
    centroids = [pts[labels == c].mean(axis=0) for c in range(labels.max() + 1)]
    if not centroids:
        return np.empty((0, 3))
    out = np.array(centroids)
    return out[np.argsort(out[:, 2])]


def _fixation_run_centroids(fix_pts: np.ndarray, labels: list[SampleLabel]) -> np.ndarray:
    """Centroids of maximal consecutive fixation runs (DBSCAN-empty fallback)."""
    runs: list[np.ndarray] = []
    current: list[int] = []
    j = 0  # index into fix_pts, which holds only the fixation samples
    for label in labels:
        if label is SampleLabel.FIXATION:
            current.append(j)
            j += 1
        elif current:
            runs.append(fix_pts[current].mean(axis=0))
            current = []
    if current:
        runs.append(fix_pts[current].mean(axis=0))
    return np.array(runs) if runs else np.empty((0, 3))


def prune(
    samples: list[GazeSample], config: PipelineConfig, layout: KeyboardLayout
) -> PrunedTrace:
    """I-VT -> keep fixations -> DBSCAN centroids, with a fallback chain.

    If DBSCAN marks everything noise, emit centroids of consecutive fixation
    runs; if there are no fixations at all, emit the first and last valid
    samples so downstream matching always has something to work with.
    """
    valid = [s for s in samples if s.valid]
    if not valid:
        raise TraceError("trace has zero valid samples")

    labeled = ivt_label(samples, config, layout)
    fix_samples = [ls.sample for ls in labeled if ls.label is SampleLabel.FIXATION]
    points = _to_xyt(fix_samples, layout)

    centroids = dbscan_reduce(points, config) if len(points) else np.empty((0, 3))
    if len(centroids) == 0 and len(points):
        centroids = _fixation_run_centroids(points, [ls.label for ls in labeled])
    if len(centroids) == 0:
        ends = [valid[0]] if len(valid) == 1 else [valid[0], valid[-1]]
        centroids = _to_xyt(ends, layout)

    # Strictly increasing time; merge any exact ties left by clustering.
    centroids = _dedupe_times(centroids)
    return PrunedTrace(points=centroids, source_count=len(samples))


def _to_xyt(samples: list[GazeSample], layout: KeyboardLayout) -> np.ndarray:
    if not samples:
        return np.empty((0, 3))
    xy = layout.normalize(np.array([[s.x_mm, s.y_mm] for s in samples]))
    t = np.array([[s.t] for s in samples])
    return np.hstack([xy, t])


def _dedupe_times(points: np.ndarray) -> np.ndarray:
    if len(points) < 2:
        return points
    keep: list[np.ndarray] = [points[0]]
    for p in points[1:]:
        if p[2] > keep[-1][2]:
            keep.append(p)
        else:
            keep[-1] = (keep[-1] + p) / 2.0
    return np.array(keep)
