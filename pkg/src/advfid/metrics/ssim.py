"""SSIM, MS-SSIM and UQI on luma planes."""

from __future__ import annotations

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..imaging import correlate, correlate_separable, downsample2, gaussian_taps, to_luminance, uniform_window
from .constants import DEFAULT_CONSTANTS, Constants


def _pair_planes(ref, dist) -> tuple[np.ndarray, np.ndarray]:
    x = to_luminance(ref)
    y = to_luminance(dist)
    if x.shape != y.shape:
        raise ValueError(f"shape mismatch: {x.shape} vs {y.shape}")
    return x, y


def ssim_components(x: np.ndarray, y: np.ndarray, const: Constants = DEFAULT_CONSTANTS):
    """Luminance and contrast-structure maps over the valid region."""
    n = const.ssim_window
    if min(x.shape) < n:
        raise ValueError(f"image smaller than the {n}x{n} SSIM window")
    g = gaussian_taps(n, const.ssim_sigma)

    def blur(p):
        return correlate_separable(p, g, g, border="valid")

    c1 = (const.ssim_k1 * const.dynamic_range) ** 2
    c2 = (const.ssim_k2 * const.dynamic_range) ** 2
    mu1 = blur(x)
    mu2 = blur(y)
    mu1_sq = mu1 * mu1
    mu2_sq = mu2 * mu2
    mu12 = mu1 * mu2
    s11 = blur(x * x) - mu1_sq
    s22 = blur(y * y) - mu2_sq
    s12 = blur(x * y) - mu12
    lum = (2.0 * mu12 + c1) / (mu1_sq + mu2_sq + c1)
    cs = (2.0 * s12 + c2) / (s11 + s22 + c2)
    return lum, cs


def ssim_map(ref, dist, const: Constants = DEFAULT_CONSTANTS) -> np.ndarray:
    x, y = _pair_planes(ref, dist)
    lum, cs = ssim_components(x, y, const)
    return lum * cs


def ssim(ref, dist, const: Constants = DEFAULT_CONSTANTS) -> float:
    return float(ssim_map(ref, dist, const).mean())


def ms_ssim_feasible_scales(shape: tuple[int, int], const: Constants = DEFAULT_CONSTANTS) -> int:
    m = min(shape)
    scales = 0
    while scales < len(const.ms_ssim_weights) and m >= const.ssim_window:
        scales += 1
        m //= 2
    return scales


def ms_ssim_detail(ref, dist, const: Constants = DEFAULT_CONSTANTS) -> tuple[float, int]:
    """MS-SSIM value and the number of scales actually used.

    Planes too small for the full pyramid use as many scales as fit, with
    the leading exponents renormalized to sum to the full-pyramid total.
    """
    x, y = _pair_planes(ref, dist)
    weights = np.asarray(const.ms_ssim_weights, dtype=np.float64)
    scales = ms_ssim_feasible_scales(x.shape, const)
    if scales == 0:
        raise ValueError(f"image smaller than the {const.ssim_window}x{const.ssim_window} SSIM window")
    if scales < weights.size:
        weights = weights[:scales] * (weights.sum() / weights[:scales].sum())
    factors = []
    for j in range(scales):
        lum, cs = ssim_components(x, y, const)
        if j < scales - 1:
            factors.append(cs.mean())
            x = downsample2(x)
            y = downsample2(y)
        else:
            factors.append((lum * cs).mean())
    # negative means would make fractional powers complex; they carry no similarity
    factors = np.maximum(np.asarray(factors), 0.0)
    return float(np.prod(factors**weights)), scales


def ms_ssim(ref, dist, const: Constants = DEFAULT_CONSTANTS) -> float:
    return ms_ssim_detail(ref, dist, const)[0]


def uqi_map(ref, dist, const: Constants = DEFAULT_CONSTANTS) -> np.ndarray:
    """Local quality index per window; NaN where the index is undefined."""
    x, y = _pair_planes(ref, dist)
    n = const.uqi_window
    if min(x.shape) < n:
        raise ValueError(f"image smaller than the {n}x{n} UQI window")
    win = uniform_window(n)

    def mean(p):
        return correlate(p, win, border="valid")

    mu1 = mean(x)
    mu2 = mean(y)
    mu12 = mu1 * mu2
    s11 = np.maximum(mean(x * x) - mu1 * mu1, 0.0)
    s22 = np.maximum(mean(y * y) - mu2 * mu2, 0.0)
    s12 = mean(x * y) - mu12
    # flat windows: the moment identity leaves rounding residue, force exact zeros
    flat1 = _flat_windows(x, n)
    flat2 = _flat_windows(y, n)
    s11[flat1] = 0.0
    s22[flat2] = 0.0
    s12[flat1 | flat2] = 0.0
    den_c = s11 + s22
    den_l = mu1 * mu1 + mu2 * mu2
    q = np.full(mu1.shape, np.nan)
    ok = (den_c > 0) & (den_l > 0)
    q[ok] = (2.0 * s12[ok] / den_c[ok]) * (2.0 * mu12[ok] / den_l[ok])
    return q


def _flat_windows(p: np.ndarray, n: int) -> np.ndarray:
    view = sliding_window_view(p, (n, n))
    return view.max(axis=(2, 3)) == view.min(axis=(2, 3))


def uqi(ref, dist, const: Constants = DEFAULT_CONSTANTS) -> float:
    q = uqi_map(ref, dist, const)
    defined = q[~np.isnan(q)]
    if defined.size == 0:
        x, y = _pair_planes(ref, dist)
        if np.array_equal(x, y):
            return 1.0
        raise ValueError("UQI undefined: every window has a zero denominator")
    return float(defined.mean())
