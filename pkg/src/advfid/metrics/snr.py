"""PSNR and CSF-weighted SNR."""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from scipy.optimize import minimize_scalar

from ..imaging import to_luminance
from .constants import DEFAULT_CONSTANTS, Constants


def _samples(img) -> np.ndarray:
    px = img.pixels if hasattr(img, "pixels") else np.asarray(img)
    return px.astype(np.float64)


def psnr(ref, dist, peak: float = 255.0) -> float:
    """PSNR in dB over all samples; ``inf`` for identical inputs."""
    a = _samples(ref)
    b = _samples(dist)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    mse = float(np.mean((a - b) ** 2))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(peak * peak / mse)


def _mannos_sakrison(f):
    f = np.asarray(f, dtype=np.float64)
    return 2.6 * (0.0192 + 0.114 * f) * np.exp(-((0.114 * f) ** 1.1))


@lru_cache(maxsize=1)
def csf_peak() -> tuple[float, float]:
    """(frequency in cycles/degree, value) at the CSF maximum."""
    res = minimize_scalar(lambda f: -float(_mannos_sakrison(f)), bounds=(0.5, 40.0), method="bounded",
                          options={"xatol": 1e-12})
    return float(res.x), float(-res.fun)


def csf(f_cpd) -> np.ndarray:
    """Mannos-Sakrison contrast sensitivity, scaled so its peak equals 1."""
    return _mannos_sakrison(f_cpd) / csf_peak()[1]


def radial_frequency(shape: tuple[int, int], nyquist_cpd: float) -> np.ndarray:
    """Radial frequency (cycles/degree) of every DFT bin, in FFT order."""
    fy = np.fft.fftfreq(shape[0])[:, None]
    fx = np.fft.fftfreq(shape[1])[None, :]
    return np.sqrt(fx * fx + fy * fy) / 0.5 * nyquist_cpd


def wsnr(ref, dist, const: Constants = DEFAULT_CONSTANTS) -> float:
    x = to_luminance(ref)
    y = to_luminance(dist)
    if x.shape != y.shape:
        raise ValueError(f"shape mismatch: {x.shape} vs {y.shape}")
    w = csf(radial_frequency(x.shape, const.wsnr_nyquist_cpd))
    err = np.abs(np.fft.fft2(x - y) * w) ** 2
    err_energy = float(err.sum())
    if err_energy == 0.0:
        return math.inf
    sig_energy = float((np.abs(np.fft.fft2(x) * w) ** 2).sum())
    return 10.0 * math.log10(sig_energy / err_energy)
