"""Most apparent distortion (MAD); lower is better, 0 for identical inputs.

Detection stage: CSF-filtered lightness error weighted by how far the local
error contrast exceeds the local (masking) contrast of the reference.
Appearance stage: differences in block statistics (std, skewness, kurtosis)
of log-Gabor subband magnitudes. The two are blended with a weight that
favours detection for small distortions and appearance for large ones.
"""

from __future__ import annotations

import math

import numpy as np

from .. import _core
from ..imaging import to_luminance
from .constants import DEFAULT_CONSTANTS, Constants
from .fsim import _freq_grid, _lowpass
from .snr import csf, csf_peak

_MIN_SIZE = 16


def _planes(ref, dist):
    x = to_luminance(ref)
    y = to_luminance(dist)
    if x.shape != y.shape:
        raise ValueError(f"shape mismatch: {x.shape} vs {y.shape}")
    if min(x.shape) < _MIN_SIZE:
        raise ValueError(f"image too small for MAD (needs at least {_MIN_SIZE}x{_MIN_SIZE})")
    return x, y


def detection_csf(shape: tuple[int, int], const: Constants) -> np.ndarray:
    """CSF with oblique-effect correction, flat below its peak (FFT layout)."""
    fx, fy = _freq_grid(*shape)
    f = np.sqrt(fx * fx + fy * fy) * 2.0 * const.mad_nfreq
    theta = np.arctan2(fy, fx)
    w = 0.7
    f = f / ((1.0 - w) / 2.0 * np.cos(4.0 * theta) + (1.0 + w) / 2.0)
    out = csf(f)
    out[f < csf_peak()[0]] = 1.0
    return out


def _blocks(src: np.ndarray, const: Constants):
    return _core.block_moments(np.ascontiguousarray(src), const.mad_block, const.mad_step)


def detection_index(x: np.ndarray, y: np.ndarray, const: Constants = DEFAULT_CONSTANTS) -> float:
    lum_x = (const.display_k * x) ** const.display_gamma
    lum_y = (const.display_k * y) ** const.display_gamma
    light_x = np.cbrt(lum_x)
    err = light_x - np.cbrt(lum_y)
    if not np.any(err):
        return 0.0
    h = detection_csf(x.shape, const)
    ref_f = np.real(np.fft.ifft2(np.fft.fft2(light_x) * h))
    err_f = np.real(np.fft.ifft2(np.fft.fft2(err) * h))

    # reference contrast uses the smallest std among the four half-size sub-blocks
    half = const.mad_block // 2
    jump = half // const.mad_step
    _, sub_std, _, _ = _core.block_moments(np.ascontiguousarray(ref_f), half, const.mad_step)
    mu, _, _, _ = _blocks(light_x, const)
    _, err_std, _, _ = _blocks(err_f, const)
    rows, cols = mu.shape
    std_min = np.minimum.reduce([
        sub_std[:rows, :cols], sub_std[jump : jump + rows, :cols],
        sub_std[:rows, jump : jump + cols], sub_std[jump : jump + rows, jump : jump + cols],
    ])
    with np.errstate(divide="ignore", invalid="ignore"):
        c_ref = np.where(mu > 0, std_min / mu, 0.0)
        c_err = np.where(mu > 0, err_std / mu, 0.0)
        log_ref = np.where(c_ref > 0, np.log(c_ref), -np.inf)
        log_err = np.where(c_err > 0, np.log(c_err), -np.inf)
    floor = const.mad_log_contrast_threshold
    vis = np.zeros_like(mu)
    a = (log_err > log_ref) & (log_ref > floor)
    b = (log_err > floor) & (log_ref <= floor)
    vis[a] = log_err[a] - log_ref[a]
    vis[b] = log_err[b] - floor

    sq = err_f * err_f
    local_mse, _, _, _ = _blocks(sq, const)
    weighted = vis * local_mse
    return float(np.sqrt(np.mean(weighted**2)) * 200.0)


def _log_gabor_bank(shape: tuple[int, int], const: Constants):
    rows, cols = shape
    fx, fy = _freq_grid(rows, cols)
    radius = np.sqrt(fx * fx + fy * fy)
    radius[0, 0] = 1.0
    theta = np.arctan2(-fy, fx)
    lp = _lowpass(rows, cols)
    norient = const.mad_orientations
    theta_sigma = math.pi / norient / const.mad_gabor_dtheta_on_sigma
    log_sigma = 2.0 * math.log(const.mad_gabor_sigma_on_f) ** 2
    radial = []
    for s in range(len(const.mad_scale_weights)):
        fo = 1.0 / (const.mad_gabor_min_wavelength * const.mad_gabor_mult**s)
        lg = np.exp(-(np.log(radius / fo) ** 2) / log_sigma) * lp
        lg[0, 0] = 0.0
        radial.append(lg)
    angular = []
    for o in range(norient):
        angl = o * math.pi / norient
        ds = np.sin(theta) * math.cos(angl) - np.cos(theta) * math.sin(angl)
        dc = np.cos(theta) * math.cos(angl) + np.sin(theta) * math.sin(angl)
        dtheta = np.abs(np.arctan2(ds, dc))
        angular.append(np.exp(-(dtheta**2) / (2.0 * theta_sigma**2)))
    return radial, angular


def appearance_index(x: np.ndarray, y: np.ndarray, const: Constants = DEFAULT_CONSTANTS) -> float:
    if np.array_equal(x, y):
        return 0.0
    radial, angular = _log_gabor_bank(x.shape, const)
    sx = np.fft.fft2(x)
    sy = np.fft.fft2(y)
    eta = None
    for weight, rf in zip(const.mad_scale_weights, radial):
        for af in angular:
            filt = rf * af
            mx = np.abs(np.fft.ifft2(sx * filt))
            my = np.abs(np.fft.ifft2(sy * filt))
            _, s1, k1, q1 = _blocks(mx, const)
            _, s2, k2, q2 = _blocks(my, const)
            term = weight * (np.abs(s1 - s2) + 2.0 * np.abs(k1 - k2) + np.abs(q1 - q2))
            eta = term if eta is None else eta + term
    return float(np.sqrt(np.mean(eta**2)))


def mad_detail(ref, dist, const: Constants = DEFAULT_CONSTANTS) -> tuple[float, float, float]:
    """(MAD, detection index, appearance index)."""
    x, y = _planes(ref, dist)
    d_detect = detection_index(x, y, const)
    d_appear = appearance_index(x, y, const)
    alpha = 1.0 / (1.0 + const.mad_beta1 * d_detect**const.mad_beta2)
    return d_detect**alpha * d_appear ** (1.0 - alpha), d_detect, d_appear


def mad(ref, dist, const: Constants = DEFAULT_CONSTANTS) -> float:
    return mad_detail(ref, dist, const)[0]
