"""Gradient similarity (GSIM)."""

from __future__ import annotations

import numpy as np

from ..imaging import gradient_magnitude, to_luminance
from .constants import DEFAULT_CONSTANTS, Constants


def gsim_map(ref, dist, const: Constants = DEFAULT_CONSTANTS) -> np.ndarray:
    """Per-pixel similarity: gradient term blended with a luminance-difference term.

    q = g - w * (g - l), with g = (2 G1 G2 + C) / (G1^2 + G2^2 + C) and
    l = 1 - ((x - y) / 255)^2.
    """
    x = to_luminance(ref)
    y = to_luminance(dist)
    if x.shape != y.shape:
        raise ValueError(f"shape mismatch: {x.shape} vs {y.shape}")
    g1 = gradient_magnitude(x, const.gsim_operator)
    g2 = gradient_magnitude(y, const.gsim_operator)
    c = const.gsim_c
    g = (2.0 * g1 * g2 + c) / (g1 * g1 + g2 * g2 + c)
    lum = 1.0 - ((x - y) / const.dynamic_range) ** 2
    return g - const.gsim_luminance_weight * (g - lum)


def gsim(ref, dist, const: Constants = DEFAULT_CONSTANTS) -> float:
    return float(gsim_map(ref, dist, const).mean())
