"""Noise quality measure (NQM).

Both images pass through a contrast pyramid built from cosine-log band-pass
filters. Band components below the contrast threshold of the viewer are
discarded, and distorted components whose contrast differs from the
original by less than one threshold are treated as unchanged. The score is
the SNR (dB) of the simulated original against the residual.
"""

from __future__ import annotations

import math

import numpy as np

from ..imaging import to_luminance
from .constants import DEFAULT_CONSTANTS, Constants


def ctf(f_cpd) -> np.ndarray:
    """Contrast threshold: reciprocal of a scaled Mannos-Sakrison CSF."""
    f = np.asarray(f_cpd, dtype=np.float64)
    return 1.0 / (200.0 * 2.6 * (0.0192 + 0.114 * f) * np.exp(-((0.114 * f) ** 1.1)))


def _band_filters(shape: tuple[int, int]):
    """Baseband plus cosine-log bands centred at 2^k cycles per image (k = 1..K)."""
    n = min(shape)
    fy = np.fft.fftfreq(shape[0])[:, None]
    fx = np.fft.fftfreq(shape[1])[None, :]
    r = np.sqrt(fx * fx + fy * fy) * n
    r[0, 0] = 1e-12
    lr = np.log2(r)
    levels = max(int(math.floor(math.log2(n / 2.0))), 1)
    base = np.where(lr <= 0, 1.0, np.where(lr < 1, 0.5 * (1 + np.cos(math.pi * lr)), 0.0))
    bands = []
    for k in range(1, levels + 1):
        d = lr - k
        bands.append(np.where(np.abs(d) < 1, 0.5 * (1 + np.cos(math.pi * d)), 0.0))
    return base, bands


def nqm(ref, dist, const: Constants = DEFAULT_CONSTANTS) -> float:
    x = to_luminance(ref)
    y = to_luminance(dist)
    if x.shape != y.shape:
        raise ValueError(f"shape mismatch: {x.shape} vs {y.shape}")
    if min(x.shape) < 8:
        raise ValueError("image too small for NQM (needs at least 8x8)")
    if np.array_equal(x, y):
        return math.inf
    base, bands = _band_filters(x.shape)
    fx = np.fft.fft2(x)
    fy = np.fft.fft2(y)
    cpd_per_cpi = 1.0 / const.nqm_viewing_angle

    low = base.copy()
    sim_x = np.real(np.fft.ifft2(fx * base))
    sim_y = np.real(np.fft.ifft2(fy * base))
    for k, g in enumerate(bands, start=1):
        ax = np.real(np.fft.ifft2(fx * g))
        ay = np.real(np.fft.ifft2(fy * g))
        # local mean below this band; a floor of 1 grey level avoids division blow-ups in black areas
        lx = np.maximum(np.real(np.fft.ifft2(fx * low)), 1.0)
        ly = np.maximum(np.real(np.fft.ifft2(fy * low)), 1.0)
        cx = ax / lx
        cy = ay / ly
        t = float(ctf(2.0**k * cpd_per_cpi))
        ax = np.where(np.abs(cx) > t, ax, 0.0)
        ay = np.where(np.abs(cy) > t, ay, 0.0)
        ay = np.where(np.abs(cx - cy) < t, ax, ay)
        sim_x += ax
        sim_y += ay
        low = low + g
    noise = float(np.sum((sim_x - sim_y) ** 2))
    if noise == 0.0:
        return math.inf
    return 10.0 * math.log10(float(np.sum(sim_x**2)) / noise)
