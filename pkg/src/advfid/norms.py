"""L0, L2 and L-infinity perturbation distances between an image and its adversarial copy.

L2 and L-infinity are measured on the [0, 1] intensity scale (samples divided
by 255 before differencing); L0 counts altered pixels.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .imaging import Image, as_image

UNIT_SCALE = "0-1"


@dataclass(frozen=True)
class PerturbationVector:
    values: np.ndarray
    scale: str
    pixel_shape: tuple[int, int, int]

    @property
    def n(self) -> int:
        return self.values.size


def perturbation(ref, test, scale: str = UNIT_SCALE) -> PerturbationVector:
    """Flattened difference ``ref - test`` over all pixels and channels."""
    a, b = as_image(ref), as_image(test)
    if a.pixels.shape != b.pixels.shape:
        raise ValueError(f"shape mismatch: {a.pixels.shape} vs {b.pixels.shape}")
    x = a.pixels.astype(np.float64)
    y = b.pixels.astype(np.float64)
    if scale == UNIT_SCALE:
        x /= 255.0
        y /= 255.0
    elif scale != "0-255":
        raise ValueError(f"unknown scale {scale!r}")
    d = x - y
    return PerturbationVector(d.reshape(-1), scale, a.pixels.shape)


def l0_norm(ref: Image, test: Image, per_sample: bool = False) -> int:
    """Number of pixels with at least one altered channel.

    ``per_sample=True`` counts altered samples instead.
    """
    a, b = as_image(ref), as_image(test)
    if a.pixels.shape != b.pixels.shape:
        raise ValueError(f"shape mismatch: {a.pixels.shape} vs {b.pixels.shape}")
    diff = a.pixels != b.pixels
    if per_sample:
        return int(diff.sum())
    return int(diff.any(axis=2).sum())


def l2_norm(ref: Image, test: Image, scale: str = UNIT_SCALE) -> float:
    v = perturbation(ref, test, scale).values
    return float(np.sqrt(np.dot(v, v)))


def linf_norm(ref: Image, test: Image, scale: str = UNIT_SCALE) -> float:
    v = perturbation(ref, test, scale).values
    return float(np.abs(v).max())
