"""Visual signal-to-noise ratio (VSNR).

Works in display luminance. The error is decomposed with a CDF 9/7 wavelet;
if every band's error contrast stays below its masked detection threshold the
distortion is invisible and the score is ``inf``. Otherwise the score is the
image RMS contrast over a blend of perceived distortion contrast and the
deviation from a sensitivity-matched contrast allocation across scales.
"""

from __future__ import annotations

import math

import numpy as np

from ..imaging import to_luminance
from .constants import DEFAULT_CONSTANTS, Constants
from .nqm import ctf
from .wavelet import wavedec2


def display_luminance(plane: np.ndarray, const: Constants) -> np.ndarray:
    return (const.display_k * plane) ** const.display_gamma


def _band_rms(details) -> float:
    energy = sum(float(np.sum(b * b)) for b in details)
    count = sum(b.size for b in details)
    return math.sqrt(energy / count)


def vsnr_levels(shape: tuple[int, int], const: Constants) -> int:
    return max(1, min(const.vsnr_levels, int(math.floor(math.log2(min(shape)))) - 2))


def vsnr(ref, dist, const: Constants = DEFAULT_CONSTANTS) -> float:
    x = to_luminance(ref)
    y = to_luminance(dist)
    if x.shape != y.shape:
        raise ValueError(f"shape mismatch: {x.shape} vs {y.shape}")
    if min(x.shape) < 8:
        raise ValueError("image too small for VSNR (needs at least 8x8)")
    lx = display_luminance(x, const)
    ly = display_luminance(y, const)
    mean_lum = float(lx.mean())
    if mean_lum <= 0:
        raise ValueError("reference is black; VSNR contrast undefined")
    err = ly - lx
    if not np.any(err):
        return math.inf
    levels = vsnr_levels(x.shape, const)
    _, det_x = wavedec2(lx, levels)
    _, det_e = wavedec2(err, levels)
    px_per_degree = const.vsnr_dpi * const.vsnr_distance_in * math.tan(math.pi / 180.0)

    c_err = np.array([_band_rms(d) / mean_lum for d in det_e])
    c_img = np.array([_band_rms(d) / mean_lum for d in det_x])
    freqs = np.array([px_per_degree / 2.0 ** (k + 1) for k in range(levels)])
    thresh = ctf(freqs)
    # contrast masking by the reference raises thresholds above the unmasked level
    masked = thresh * np.maximum(1.0, c_img / thresh) ** const.vsnr_masking_exponent
    if np.all(c_err < masked):
        return math.inf

    c_image = float(lx.std() / mean_lum)
    if c_image == 0.0:
        raise ValueError("reference has no contrast; VSNR undefined")
    d_pc = float(np.sqrt(np.sum(c_err**2)))
    sens = 1.0 / thresh
    ideal = d_pc * sens / np.sqrt(np.sum(sens**2))
    d_gp = float(np.sqrt(np.sum((c_err - ideal) ** 2)))
    a = const.vsnr_alpha
    dist_contrast = a * d_pc + (1.0 - a) * d_gp / math.sqrt(2.0)
    if dist_contrast <= 0:
        return math.inf
    return 20.0 * math.log10(c_image / dist_contrast)
