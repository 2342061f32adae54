"""Single-key tap inference: 2D Gaussian spatial likelihood + character bigram.

The Gaussian densities are normalized over the 26 letters before blending so
both terms are probabilities; the blend is additive, unlike the decoder's
multiplicative fusion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import LETTERS, KeyboardLayout
from .lexicon import CharNgramModel


@dataclass(frozen=True)
class TapConfig:
    sigma_x_mm: float = 26.0
    sigma_y_mm: float = 26.0
    alpha_tap: float = 0.5

    def __post_init__(self):
        if self.sigma_x_mm <= 0 or self.sigma_y_mm <= 0:
            raise ValueError("sigma must be positive")
        if not 0.0 <= self.alpha_tap <= 1.0:
            raise ValueError("alpha_tap must be in [0, 1]")


def p_gauss(
    x_mm: float, y_mm: float, letter: str, layout: KeyboardLayout, config: TapConfig = TapConfig()
) -> float:
    """Diagonal-covariance Gaussian density of the tap point around the key center."""
    cx, cy = layout.key_center(letter)
    zx = (x_mm - cx) / config.sigma_x_mm
    zy = (y_mm - cy) / config.sigma_y_mm
    norm = 1.0 / (2.0 * math.pi * config.sigma_x_mm * config.sigma_y_mm)
    return norm * math.exp(-0.5 * (zx * zx + zy * zy))


def gauss_over_letters(
    x_mm: float, y_mm: float, layout: KeyboardLayout, config: TapConfig = TapConfig()
) -> np.ndarray:
    """Gaussian densities for all 26 letters, normalized to sum to one."""
    dens = np.array([p_gauss(x_mm, y_mm, c, layout, config) for c in LETTERS])
    total = dens.sum()
    if total == 0.0:
        return np.full(len(LETTERS), 1.0 / len(LETTERS))
    return dens / total


def infer_letter(
    x_mm: float,
    y_mm: float,
    prefix: str,
    layout: KeyboardLayout,
    char_model: CharNgramModel,
    config: TapConfig = TapConfig(),
) -> list[tuple[str, float]]:
    """Letters ranked by alpha*p_bigram + (1-alpha)*p_gauss_normalized."""
    spatial = gauss_over_letters(x_mm, y_mm, layout, config)
    lm = np.array([char_model.p_char(c, prefix) for c in LETTERS])
    blend = config.alpha_tap * lm + (1.0 - config.alpha_tap) * spatial
    order = sorted(range(len(LETTERS)), key=lambda i: (-blend[i], LETTERS[i]))
    return [(LETTERS[i], float(blend[i])) for i in order]
