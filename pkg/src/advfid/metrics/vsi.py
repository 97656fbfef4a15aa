"""Visual saliency-induced index (VSI) with SDSP saliency maps."""

from __future__ import annotations

import numpy as np
from PIL import Image as PILImage

from ..imaging import to_rgb
from .constants import DEFAULT_CONSTANTS, Constants
from .fsim import _decimate_average, downsample_factor, scharr_magnitude

_SALIENCY_GRID = 256


def _resize(plane: np.ndarray, rows: int, cols: int) -> np.ndarray:
    img = PILImage.fromarray(plane.astype(np.float32), mode="F")
    return np.asarray(img.resize((cols, rows), PILImage.BILINEAR), dtype=np.float64)


def rgb_to_lab(rgb: np.ndarray) -> np.ndarray:
    """sRGB (0-255) to CIELAB under D65."""
    c = rgb / 255.0
    lin = np.where(c > 0.04045, ((c + 0.055) / 1.055) ** 2.4, c / 12.92)
    m = np.array([[0.412453, 0.357580, 0.180423],
                  [0.212671, 0.715160, 0.072169],
                  [0.019334, 0.119193, 0.950227]])
    xyz = lin @ m.T / np.array([0.950456, 1.0, 1.088754])
    f = np.where(xyz > 0.008856, np.cbrt(xyz), 7.787 * xyz + 16.0 / 116.0)
    lab = np.empty_like(rgb)
    lab[..., 0] = 116.0 * f[..., 1] - 16.0
    lab[..., 1] = 500.0 * (f[..., 0] - f[..., 1])
    lab[..., 2] = 200.0 * (f[..., 1] - f[..., 2])
    return lab


def _sdsp_log_gabor(rows: int, cols: int, omega0: float, sigma_f: float) -> np.ndarray:
    u1 = (np.arange(1, cols + 1) - (cols // 2 + 1)) / (cols - cols % 2)
    u2 = (np.arange(1, rows + 1) - (rows // 2 + 1)) / (rows - rows % 2)
    u1, u2 = np.meshgrid(u1, u2)
    outside = u1 * u1 + u2 * u2 > 0.25
    u1 = np.fft.ifftshift(np.where(outside, 0.0, u1))
    u2 = np.fft.ifftshift(np.where(outside, 0.0, u2))
    radius = np.sqrt(u1 * u1 + u2 * u2)
    lg = np.zeros_like(radius)
    live = radius > 0
    lg[live] = np.exp(-(np.log(radius[live] / omega0) ** 2) / (2.0 * sigma_f**2))
    return lg


def sdsp(img, const: Constants = DEFAULT_CONSTANTS) -> np.ndarray:
    """Saliency from band-pass response, centre prior and warm-colour prior, scaled to [0,1]."""
    rgb = to_rgb(img)
    rows0, cols0 = rgb.shape[:2]
    n = _SALIENCY_GRID
    small = np.stack([_resize(rgb[:, :, ch], n, n) for ch in range(3)], axis=2)
    lab = rgb_to_lab(small)
    lg = _sdsp_log_gabor(n, n, const.sdsp_omega0, const.sdsp_sigma_f)
    resp = [np.real(np.fft.ifft2(np.fft.fft2(lab[:, :, ch]) * lg)) for ch in range(3)]
    sf = np.sqrt(resp[0] ** 2 + resp[1] ** 2 + resp[2] ** 2)
    yy, xx = np.mgrid[1 : n + 1, 1 : n + 1]
    sd = np.exp(-((yy - n / 2.0) ** 2 + (xx - n / 2.0) ** 2) / const.sdsp_sigma_d**2)

    def unit(p):
        lo, hi = p.min(), p.max()
        return (p - lo) / (hi - lo) if hi > lo else np.zeros_like(p)

    a = unit(lab[:, :, 1])
    b = unit(lab[:, :, 2])
    sc = 1.0 - np.exp(-(a * a + b * b) / const.sdsp_sigma_c**2)
    vs = _resize(sf * sd * sc, rows0, cols0)
    return unit(vs)


def _lmn(rgb: np.ndarray):
    r, g, b = rgb[:, :, 0], rgb[:, :, 1], rgb[:, :, 2]
    return (0.06 * r + 0.63 * g + 0.27 * b,
            0.30 * r + 0.04 * g - 0.35 * b,
            0.34 * r - 0.60 * g + 0.17 * b)


def vsi(ref, dist, const: Constants = DEFAULT_CONSTANTS) -> float:
    rgb1 = to_rgb(ref)
    rgb2 = to_rgb(dist)
    if rgb1.shape != rgb2.shape:
        raise ValueError(f"shape mismatch: {rgb1.shape} vs {rgb2.shape}")
    if min(rgb1.shape[:2]) < 3:
        raise ValueError("image too small for VSI")
    vs1 = sdsp(rgb1, const)
    vs2 = sdsp(rgb2, const)
    l1, m1, n1 = _lmn(rgb1)
    l2, m2, n2 = _lmn(rgb2)
    f = downsample_factor(l1.shape)
    vs1, vs2, l1, m1, n1, l2, m2, n2 = (
        _decimate_average(p, f) for p in (vs1, vs2, l1, m1, n1, l2, m2, n2)
    )
    g1 = scharr_magnitude(l1)
    g2 = scharr_magnitude(l2)
    s_vs = (2.0 * vs1 * vs2 + const.vsi_c1) / (vs1**2 + vs2**2 + const.vsi_c1)
    s_gm = (2.0 * g1 * g2 + const.vsi_c2) / (g1**2 + g2**2 + const.vsi_c2)
    s_c = ((2.0 * m1 * m2 + const.vsi_c3) / (m1**2 + m2**2 + const.vsi_c3)
           * (2.0 * n1 * n2 + const.vsi_c3) / (n1**2 + n2**2 + const.vsi_c3))
    # chroma similarity can go negative; the fractional power keeps its real part
    s_c = np.real(s_c.astype(complex) ** const.vsi_beta)
    vs_max = np.maximum(vs1, vs2)
    sim = s_vs * s_gm**const.vsi_alpha * s_c
    total = vs_max.sum()
    if total <= 0:
        return float(sim.mean())
    return float((sim * vs_max).sum() / total)
