"""Independent oracles and sample generators shared across test modules.

Everything here is implemented from first principles (exhaustive search,
union-find, closed-form geometry) so package code is never graded against
itself.
"""

from __future__ import annotations

import math

import numpy as np

from gazeswipe.trace_pipeline import GazeSample


def rank_tau(points: np.ndarray, temporal_weight: float = 1.0) -> np.ndarray:
    """Third coordinate := normalized rank in [0, w]; mirrors the matcher's rule."""
    pts = np.asarray(points, dtype=float)
    out = np.zeros((len(pts), 3))
    out[:, :2] = pts[:, :2]
    if len(pts) > 1:
        out[:, 2] = np.arange(len(pts)) / (len(pts) - 1) * temporal_weight
    return out


def dtw_oracle(a: np.ndarray, b: np.ndarray) -> float:
    """Minimum path cost over every monotone warping path, by enumeration.

    Steps {(1,0), (0,1), (1,1)}; the partial-sum cutoff is exact because all
    pointwise costs are non-negative.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    cost = np.sqrt(((a[:, None, :] - b[None, :, :]) ** 2).sum(axis=2))
    n, m = cost.shape
    best = math.inf

    def walk(i: int, j: int, acc: float) -> None:
        nonlocal best
        acc += cost[i, j]
        if acc >= best:
            return
        if i == n - 1 and j == m - 1:
            best = acc
            return
        if i + 1 < n:
            walk(i + 1, j, acc)
        if j + 1 < m:
            walk(i, j + 1, acc)
        if i + 1 < n and j + 1 < m:
            walk(i + 1, j + 1, acc)

    walk(0, 0, 0.0)
    return best


def dbscan_oracle(points: np.ndarray, eps: float, min_pts: int):
    """Reference clustering: (noise set, core clusters, border candidates).

    Core clusters (connected components of core points under eps-adjacency)
    and the noise set are unique; border points may validly join any listed
    candidate cluster, which is the only implementation freedom DBSCAN has.
    """
    pts = np.asarray(points, dtype=float)
    n = len(pts)
    d2 = ((pts[:, None, :] - pts[None, :, :]) ** 2).sum(axis=2)
    within = d2 <= eps * eps
    core = within.sum(axis=1) >= min_pts

    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        if not core[i]:
            continue
        for j in range(i + 1, n):
            if core[j] and within[i, j]:
                parent[find(i)] = find(j)

    clusters: dict[int, set[int]] = {}
    for i in range(n):
        if core[i]:
            clusters.setdefault(find(i), set()).add(i)
    core_clusters = [frozenset(c) for c in clusters.values()]

    noise = set()
    border: dict[int, set[int]] = {}
    for i in range(n):
        if core[i]:
            continue
        hosts = {ci for ci, members in enumerate(core_clusters) if any(within[i, j] for j in members)}
        if hosts:
            border[i] = hosts
        else:
            noise.add(i)
    return noise, core_clusters, border


def levenshtein_oracle(a: str, b: str) -> int:
    """Plain recursive edit distance; fine for short strings."""
    if not a:
        return len(b)
    if not b:
        return len(a)
    return min(
        levenshtein_oracle(a[1:], b) + 1,
        levenshtein_oracle(a, b[1:]) + 1,
        levenshtein_oracle(a[1:], b[1:]) + (a[0] != b[0]),
    )


# -- gaze-stream generators ---------------------------------------------------


def dwell_glide_stream(
    points_mm: list[tuple[float, float]],
    t0: float = 0.0,
    dwell_s: float = 0.30,
    glide_s: float = 0.05,
    rate_hz: float = 200.0,
) -> list[tuple[float, float, float]]:
    """(t, x, y) triples: fixate each point, glide linearly between them."""
    dt = 1.0 / rate_hz
    out: list[tuple[float, float, float]] = []
    t = t0
    for i, (x, y) in enumerate(points_mm):
        for _ in range(int(round(dwell_s * rate_hz))):
            out.append((t, x, y))
            t += dt
        if i + 1 < len(points_mm):
            nx, ny = points_mm[i + 1]
            steps = max(1, int(round(glide_s * rate_hz)))
            for k in range(1, steps + 1):
                u = k / (steps + 1)
                out.append((t, x + u * (nx - x), y + u * (ny - y)))
                t += dt
    return out


def drive_swipe(session, points_mm, t0: float = 0.0, dwell_s: float = 0.30):
    """pinch_down at the first point, stream gaze, pinch_up at the last."""
    stream = dwell_glide_stream(points_mm, t0=t0, dwell_s=dwell_s)
    (t_down, x_down, y_down), rest = stream[0], stream[1:]
    session.on_pinch_down(x_down, y_down, t_down)
    for t, x, y in rest:
        session.on_gaze(x, y, t)
    t_up = rest[-1][0] + 1.0 / 200.0
    x_up, y_up = points_mm[-1]
    return session.on_pinch_up(x_up, y_up, t_up), t_up


def polyline_distance(point: np.ndarray, vertices: np.ndarray) -> float:
    """Distance from a point to a piecewise-linear path."""
    p = np.asarray(point, dtype=float)
    v = np.asarray(vertices, dtype=float)
    if len(v) == 1:
        return float(np.linalg.norm(p - v[0]))
    best = math.inf
    for a, b in zip(v[:-1], v[1:]):
        ab = b - a
        denom = float(ab @ ab)
        u = 0.0 if denom == 0 else float(np.clip((p - a) @ ab / denom, 0.0, 1.0))
        best = min(best, float(np.linalg.norm(p - (a + u * ab))))
    return best


def samples_from_stream(stream: list[tuple[float, float, float]]) -> list[GazeSample]:
    return [GazeSample(t, x, y) for t, x, y in stream]
