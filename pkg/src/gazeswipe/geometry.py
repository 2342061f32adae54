"""Virtual QWERTY keyboard geometry: key positions, hit testing, normalization.

All positions are millimetres in the keyboard plane, origin at the top-left
corner of the letter-key area, x growing right and y growing down.  Normalized
coordinates divide both axes by the letter-area width so aspect ratio is
preserved under a single scale.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

LETTERS = "abcdefghijklmnopqrstuvwxyz"

# Key dimensions used by the shipped default layout (mm).
DEFAULT_KEY_W = 51.0
DEFAULT_KEY_H = 56.7
DEFAULT_GAP_H = 11.0
DEFAULT_GAP_V = 9.30
DEFAULT_VIEW_DIST = 700.0

QWERTY_ROWS = ("qwertyuiop", "asdfghjkl", "zxcvbnm")
# Row offsets as fractions of horizontal key pitch (commodity-keyboard stagger).
QWERTY_STAGGER = (0.0, 0.25, 0.75)


class LayoutError(ValueError):
    """Raised for malformed layouts or unknown key labels."""


@dataclass(frozen=True)
class Key:
    label: str
    cx_mm: float
    cy_mm: float
    w_mm: float
    h_mm: float

    @property
    def center(self) -> np.ndarray:
        return np.array([self.cx_mm, self.cy_mm], dtype=float)

    def contains(self, x_mm: float, y_mm: float) -> bool:
        return (
            abs(x_mm - self.cx_mm) <= self.w_mm / 2.0
            and abs(y_mm - self.cy_mm) <= self.h_mm / 2.0
        )


class KeyboardLayout:
    """Immutable key-geometry model; safe to share read-only across threads."""

    def __init__(self, keys: list[Key], viewing_distance_mm: float = DEFAULT_VIEW_DIST):
        if viewing_distance_mm <= 0:
            raise LayoutError("viewing_distance_mm must be positive")
        self.keys = tuple(keys)
        self.viewing_distance_mm = float(viewing_distance_mm)
        self._by_label = {k.label: k for k in self.keys}
        self._validate()

        letter_keys = [k for k in self.keys if k.label in LETTERS]
        xs0 = [k.cx_mm - k.w_mm / 2 for k in letter_keys]
        xs1 = [k.cx_mm + k.w_mm / 2 for k in letter_keys]
        ys0 = [k.cy_mm - k.h_mm / 2 for k in letter_keys]
        ys1 = [k.cy_mm + k.h_mm / 2 for k in letter_keys]
        self.origin_mm = np.array([min(xs0), min(ys0)])
        self.keyboard_width_mm = max(xs1) - min(xs0)
        self.letter_area_height_mm = max(ys1) - min(ys0)
        if self.keyboard_width_mm <= 0:
            raise LayoutError("keyboard width must be positive")
        self._letter_centers = np.array(
            [self._by_label[c].center for c in LETTERS]
        )  # (26, 2), row i = letter chr(ord('a')+i)

    def _validate(self) -> None:
        labels = [k.label for k in self.keys]
        for c in LETTERS:
            if labels.count(c) != 1:
                raise LayoutError(f"letter {c!r} must appear exactly once")
        for special in ("space", "delete"):
            if labels.count(special) > 1:
                raise LayoutError(f"key {special!r} must appear at most once")
        ks = self.keys
        for i in range(len(ks)):
            for j in range(i + 1, len(ks)):
                a, b = ks[i], ks[j]
                if (
                    abs(a.cx_mm - b.cx_mm) < (a.w_mm + b.w_mm) / 2
                    and abs(a.cy_mm - b.cy_mm) < (a.h_mm + b.h_mm) / 2
                ):
                    raise LayoutError(f"keys {a.label!r} and {b.label!r} overlap")

    # -- lookups ---------------------------------------------------------

    def key(self, label: str) -> Key:
        try:
            return self._by_label[label]
        except KeyError:
            raise LayoutError(f"unknown key label {label!r}") from None

    def key_center(self, label: str) -> np.ndarray:
        return self.key(label).center

    def key_at(self, x_mm: float, y_mm: float) -> str | None:
        for k in self.keys:
            if k.contains(x_mm, y_mm):
                return k.label
        return None

    def letters_within(self, x_mm: float, y_mm: float, radius_mm: float) -> set[str]:
        if radius_mm <= 0:
            raise LayoutError("radius_mm must be positive")
        p = np.array([x_mm, y_mm])
        d = np.linalg.norm(self._letter_centers - p, axis=1)
        return {LETTERS[i] for i in np.nonzero(d <= radius_mm)[0]}

    # -- conversions -----------------------------------------------------

    def visual_angle_deg(self, extent_mm: float) -> float:
        return math.degrees(2.0 * math.atan((extent_mm / 2.0) / self.viewing_distance_mm))

    def normalize(self, points_mm: np.ndarray) -> np.ndarray:
        """mm -> normalized keyboard units (shared scale: letter-area width)."""
        return (np.asarray(points_mm, dtype=float) - self.origin_mm) / self.keyboard_width_mm

    def denormalize(self, points_norm: np.ndarray) -> np.ndarray:
        return np.asarray(points_norm, dtype=float) * self.keyboard_width_mm + self.origin_mm

    @property
    def center_mm(self) -> np.ndarray:
        return self.origin_mm + np.array(
            [self.keyboard_width_mm / 2.0, self.letter_area_height_mm / 2.0]
        )

    # -- serialization ---------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "keys": [
                {"label": k.label, "cx_mm": k.cx_mm, "cy_mm": k.cy_mm, "w_mm": k.w_mm, "h_mm": k.h_mm}
                for k in self.keys
            ],
            "viewing_distance_mm": self.viewing_distance_mm,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "KeyboardLayout":
        keys = [
            Key(str(e["label"]), float(e["cx_mm"]), float(e["cy_mm"]), float(e["w_mm"]), float(e["h_mm"]))
            for e in d["keys"]
        ]
        return cls(keys, float(d.get("viewing_distance_mm", DEFAULT_VIEW_DIST)))


def build_qwerty_layout(
    key_w: float = DEFAULT_KEY_W,
    key_h: float = DEFAULT_KEY_H,
    gap_h: float = DEFAULT_GAP_H,
    gap_v: float = DEFAULT_GAP_V,
    viewing_distance_mm: float = DEFAULT_VIEW_DIST,
    space_below: bool = True,
) -> KeyboardLayout:
    """Three staggered letter rows plus a wide space key and a delete key.

    The space/delete row sits below the letters when space_below, above
    otherwise; the decoder is indifferent to that placement.
    """
    pitch_x = key_w + gap_h
    pitch_y = key_h + gap_v
    keys: list[Key] = []
    for row, (letters, stagger) in enumerate(zip(QWERTY_ROWS, QWERTY_STAGGER)):
        for col, ch in enumerate(letters):
            cx = stagger * pitch_x + col * pitch_x + key_w / 2.0
            cy = row * pitch_y + key_h / 2.0
            keys.append(Key(ch, cx, cy, key_w, key_h))

    extra_row_cy = 3 * pitch_y + key_h / 2.0 if space_below else -pitch_y + key_h / 2.0
    space_w = 6 * pitch_x - gap_h
    space_cx = 1.5 * pitch_x + space_w / 2.0
    keys.append(Key("space", space_cx, extra_row_cy, space_w, key_h))
    delete_cx = space_cx + space_w / 2.0 + gap_h + pitch_x + key_w / 2.0
    keys.append(Key("delete", delete_cx, extra_row_cy, key_w + pitch_x, key_h))
    return KeyboardLayout(keys, viewing_distance_mm)


def load_layout(path: str | Path) -> KeyboardLayout:
    with open(path, encoding="utf-8") as f:
        return KeyboardLayout.from_dict(json.load(f))


def save_layout(layout: KeyboardLayout, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(layout.to_dict(), f, indent=1)
        f.write("\n")
