"""Feature similarity (FSIM, FSIMc) built on log-Gabor phase congruency."""

from __future__ import annotations

import math

import numpy as np

from .. import _core
from ..imaging import gradient_components, to_rgb
from .constants import DEFAULT_CONSTANTS, Constants

_EPS = 1e-4


def _freq_grid(rows: int, cols: int) -> tuple[np.ndarray, np.ndarray]:
    """Normalized frequency coordinates (cycles/pixel), unshifted FFT layout."""

    def axis(n):
        if n % 2:
            return np.arange(-(n - 1) / 2, (n - 1) / 2 + 1) / max(n - 1, 1)
        return np.arange(-n / 2, n / 2) / n

    x, y = np.meshgrid(axis(cols), axis(rows))
    return np.fft.ifftshift(x), np.fft.ifftshift(y)


def _lowpass(rows: int, cols: int, cutoff: float = 0.45, order: int = 15) -> np.ndarray:
    x, y = _freq_grid(rows, cols)
    r = np.sqrt(x * x + y * y)
    return 1.0 / (1.0 + (r / cutoff) ** (2 * order))


def phase_congruency(plane: np.ndarray, const: Constants = DEFAULT_CONSTANTS) -> np.ndarray:
    """Phase congruency map summed over orientations (noise-compensated energy / amplitude)."""
    plane = np.asarray(plane, dtype=np.float64)
    rows, cols = plane.shape
    nscale = const.pc_scales
    norient = const.pc_orientations
    x, y = _freq_grid(rows, cols)
    radius = np.sqrt(x * x + y * y)
    radius[0, 0] = 1.0
    theta = np.arctan2(-y, x)
    sintheta, costheta = np.sin(theta), np.cos(theta)
    lp = _lowpass(rows, cols)
    log_sigma = 2.0 * math.log(const.pc_sigma_on_f) ** 2
    log_gabor = []
    for s in range(nscale):
        fo = 1.0 / (const.pc_min_wavelength * const.pc_mult**s)
        lg = np.exp(-(np.log(radius / fo) ** 2) / log_sigma) * lp
        lg[0, 0] = 0.0
        log_gabor.append(lg)
    theta_sigma = math.pi / norient / const.pc_dtheta_on_sigma
    spectrum = np.fft.fft2(plane)
    sqrt_n = math.sqrt(rows * cols)

    energy_all = np.zeros_like(plane)
    an_all = np.zeros_like(plane)
    for o in range(norient):
        angl = o * math.pi / norient
        ds = sintheta * math.cos(angl) - costheta * math.sin(angl)
        dc = costheta * math.cos(angl) + sintheta * math.sin(angl)
        dtheta = np.abs(np.arctan2(ds, dc))
        spread = np.exp(-(dtheta**2) / (2.0 * theta_sigma**2))
        sum_e = np.zeros_like(plane)
        sum_o = np.zeros_like(plane)
        sum_an = np.zeros_like(plane)
        responses = []
        ifft_filters = []
        em_n = 0.0
        for s in range(nscale):
            filt = log_gabor[s] * spread
            ifft_filters.append(np.real(np.fft.ifft2(filt)) * sqrt_n)
            eo = np.fft.ifft2(spectrum * filt)
            responses.append(eo)
            sum_an += np.abs(eo)
            sum_e += eo.real
            sum_o += eo.imag
            if s == 0:
                em_n = float(np.sum(filt * filt))
        x_energy = np.sqrt(sum_e**2 + sum_o**2) + _EPS
        mean_e = sum_e / x_energy
        mean_o = sum_o / x_energy
        energy = np.zeros_like(plane)
        for eo in responses:
            e, od = eo.real, eo.imag
            energy += e * mean_e + od * mean_o - np.abs(e * mean_o - od * mean_e)

        # noise level from the finest scale, assuming a Rayleigh amplitude distribution
        median_e2n = float(np.median(np.abs(responses[0]) ** 2))
        mean_e2n = -median_e2n / math.log(0.5)
        noise_power = mean_e2n / em_n if em_n > 0 else 0.0
        est_sum_an2 = np.zeros_like(plane)
        for f in ifft_filters:
            est_sum_an2 += f * f
        est_sum_aiaj = np.zeros_like(plane)
        for si in range(nscale - 1):
            for sj in range(si + 1, nscale):
                est_sum_aiaj += ifft_filters[si] * ifft_filters[sj]
        est_noise_energy2 = 2 * noise_power * est_sum_an2.sum() + 4 * noise_power * est_sum_aiaj.sum()
        tau = math.sqrt(max(est_noise_energy2, 0.0) / 2.0)
        est_noise = tau * math.sqrt(math.pi / 2.0)
        est_noise_sigma = math.sqrt((2.0 - math.pi / 2.0) * tau * tau)
        threshold = (est_noise + const.pc_k * est_noise_sigma) / 1.7
        energy_all += np.maximum(energy - threshold, 0.0)
        an_all += sum_an
    pc = np.zeros_like(plane)
    np.divide(energy_all, an_all, out=pc, where=an_all > 0)
    return pc


def _decimate_average(p: np.ndarray, f: int) -> np.ndarray:
    """F x F box average ('same' alignment, zero padded), keeping every F-th sample."""
    if f <= 1:
        return p
    before = (f + 1) // 2 - 1
    after = f // 2
    src = np.pad(p, ((before, after), (before, after)))
    k = np.full((f, f), 1.0 / (f * f))
    return _core.correlate_valid(np.ascontiguousarray(src), k)[::f, ::f]


def downsample_factor(shape: tuple[int, int]) -> int:
    return max(1, int(round(min(shape) / 256.0)))


def scharr_magnitude(plane: np.ndarray) -> np.ndarray:
    gx, gy = gradient_components(plane, "scharr")
    return np.sqrt(gx * gx + gy * gy) / 16.0


def yiq(img) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    rgb = to_rgb(img)
    r, g, b = rgb[:, :, 0], rgb[:, :, 1], rgb[:, :, 2]
    y = 0.299 * r + 0.587 * g + 0.114 * b
    i = 0.596 * r - 0.274 * g - 0.322 * b
    q = 0.211 * r - 0.523 * g + 0.312 * b
    return y, i, q


def _fsim_terms(ref, dist, const: Constants):
    y1, i1, q1 = yiq(ref)
    y2, i2, q2 = yiq(dist)
    if y1.shape != y2.shape:
        raise ValueError(f"shape mismatch: {y1.shape} vs {y2.shape}")
    if min(y1.shape) < 3:
        raise ValueError("image too small for FSIM")
    f = downsample_factor(y1.shape)
    y1, i1, q1, y2, i2, q2 = (_decimate_average(p, f) for p in (y1, i1, q1, y2, i2, q2))
    pc1 = phase_congruency(y1, const)
    pc2 = phase_congruency(y2, const)
    g1 = scharr_magnitude(y1)
    g2 = scharr_magnitude(y2)
    pc_sim = (2.0 * pc1 * pc2 + const.fsim_t1) / (pc1 * pc1 + pc2 * pc2 + const.fsim_t1)
    g_sim = (2.0 * g1 * g2 + const.fsim_t2) / (g1 * g1 + g2 * g2 + const.fsim_t2)
    pcm = np.maximum(pc1, pc2)
    i_sim = (2.0 * i1 * i2 + const.fsim_t3) / (i1 * i1 + i2 * i2 + const.fsim_t3)
    q_sim = (2.0 * q1 * q2 + const.fsim_t4) / (q1 * q1 + q2 * q2 + const.fsim_t4)
    return g_sim * pc_sim, i_sim * q_sim, pcm


def _pool(sim: np.ndarray, weight: np.ndarray) -> float:
    total = weight.sum()
    if total <= 0:
        # featureless (flat) content: fall back to uniform weighting
        return float(sim.mean())
    return float((sim * weight).sum() / total)


def fsim(ref, dist, const: Constants = DEFAULT_CONSTANTS) -> float:
    sl, _, pcm = _fsim_terms(ref, dist, const)
    return _pool(sl, pcm)


def fsimc(ref, dist, const: Constants = DEFAULT_CONSTANTS) -> float:
    sl, chroma, pcm = _fsim_terms(ref, dist, const)
    # I/Q similarities lie in (0, 1]; the clip only guards the fractional power
    return _pool(sl * np.clip(chroma, 0.0, None) ** const.fsim_lambda, pcm)
