"""Content descriptors: spatial information and colourfulness."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .imaging import gradient_magnitude, to_luminance


@dataclass(frozen=True)
class ContentDescriptor:
    stimulus_id: str
    si: float
    cf: float | None  # None for grayscale content


def spatial_information(img) -> float:
    """Standard deviation of the Sobel magnitude of the luma plane."""
    y = to_luminance(img)
    if min(y.shape) < 3:
        raise ValueError("image must be at least 3x3")
    return float(gradient_magnitude(y, "sobel").std())


def colorfulness(img) -> float:
    px = img.pixels if hasattr(img, "pixels") else np.asarray(img)
    if px.ndim != 3 or px.shape[2] != 3:
        raise ValueError("colourfulness needs a 3-channel image")
    rgb = px.astype(np.float64)
    rg = rgb[:, :, 0] - rgb[:, :, 1]
    yb = 0.5 * (rgb[:, :, 0] + rgb[:, :, 1]) - rgb[:, :, 2]
    return math.sqrt(rg.var() + yb.var()) + 0.3 * math.sqrt(rg.mean() ** 2 + yb.mean() ** 2)


def describe(stimulus_id: str, img) -> ContentDescriptor:
    if hasattr(img, "channels"):
        channels = img.channels
    else:
        arr = np.asarray(img)
        channels = arr.shape[2] if arr.ndim == 3 else 1
    cf = colorfulness(img) if channels == 3 else None
    return ContentDescriptor(stimulus_id, spatial_information(img), cf)
