"""Visual information fidelity: pixel-domain VIFp, wavelet-domain VIF, and IFC.

All three model the reference as a Gaussian scale mixture and the distortion
as a gain plus additive noise; VIF and VIFp add visual noise and normalize by
the reference information, IFC reports the raw distorted-image information.
"""

from __future__ import annotations

import math

import numpy as np

from ..imaging import correlate_separable, gaussian_taps, to_luminance
from . import pyramid
from .constants import DEFAULT_CONSTANTS, Constants

_TOL = 1e-10


def _planes(ref, dist):
    x = to_luminance(ref)
    y = to_luminance(dist)
    if x.shape != y.shape:
        raise ValueError(f"shape mismatch: {x.shape} vs {y.shape}")
    return x, y


def _channel_estimate(s11, s22, s12):
    """Gain ``g`` and distortion-noise variance ``sv`` of the channel ref -> dist.

    Rules follow the reference implementation except that the noise floor is
    0 rather than a tolerance, so identical inputs give exactly ``g=1, sv=0``.
    """
    s11 = np.maximum(s11, 0.0)
    s22 = np.maximum(s22, 0.0)
    g = np.zeros_like(s11)
    live = s11 >= _TOL
    g[live] = s12[live] / s11[live]
    sv = s22 - g * s12
    sv[~live] = s22[~live]
    s11 = np.where(live, s11, 0.0)
    flat2 = s22 < _TOL
    g[flat2] = 0.0
    sv[flat2] = 0.0
    neg = g < 0
    sv[neg] = s22[neg]
    g[neg] = 0.0
    return g, np.maximum(sv, 0.0), s11


def vifp_min_size(scales: int = 4) -> int:
    """Smallest square side for which every pixel-domain scale has valid support."""
    side = 1
    while True:
        n = side
        ok = True
        for scale in range(1, scales + 1):
            w = 2 ** (scales - scale + 1) + 1
            if scale > 1:
                n = (n - (w - 1) + 1) // 2
            if n < w:
                ok = False
                break
        if ok:
            return side
        side += 1


def vifp(ref, dist, const: Constants = DEFAULT_CONSTANTS) -> float:
    x, y = _planes(ref, dist)
    scales = const.vifp_scales
    need = vifp_min_size(scales)
    if min(x.shape) < need:
        raise ValueError(f"VIFp needs at least {need}x{need} pixels for {scales} scales")
    sigma_nsq = const.vifp_sigma_nsq
    num = 0.0
    den = 0.0
    for scale in range(1, scales + 1):
        n = 2 ** (scales - scale + 1) + 1
        g1 = gaussian_taps(n, n / 5.0)

        def blur(p):
            return correlate_separable(p, g1, g1, border="valid")

        if scale > 1:
            x = blur(x)[::2, ::2]
            y = blur(y)[::2, ::2]
        mu1 = blur(x)
        mu2 = blur(y)
        s11 = blur(x * x) - mu1 * mu1
        s22 = blur(y * y) - mu2 * mu2
        s12 = blur(x * y) - mu1 * mu2
        g, sv, s11 = _channel_estimate(s11, s22, s12)
        num += float(np.sum(np.log10(1.0 + g * g * s11 / (sv + sigma_nsq))))
        den += float(np.sum(np.log10(1.0 + s11 / sigma_nsq)))
    return _ratio(num, den, x, y)


def _ratio(num: float, den: float, x, y) -> float:
    if den == 0.0:
        if np.array_equal(x, y):
            return 1.0
        raise ValueError("reference carries no information (flat image); VIF undefined")
    return num / den


# wavelet-domain GSM machinery ------------------------------------------------

def _box_reflect(p: np.ndarray, size: int) -> np.ndarray:
    """Same-size box sum with whole-sample reflection at the borders."""
    r = size // 2
    src = np.pad(p, r, mode="reflect")
    ones = np.ones(size)
    return correlate_separable(src, ones, ones, border="valid")


def _gsm_subband(y: np.ndarray, yn: np.ndarray, block: int, winsize: int):
    """Per-block GSM multiplier, channel gain/noise and covariance eigenvalues."""
    h = (y.shape[0] // block) * block
    w = (y.shape[1] // block) * block
    y = y[:h, :w]
    yn = yn[:h, :w]
    area = winsize * winsize

    # channel parameters at the centre of each aligned block
    c = block // 2
    sl = (slice(c, h, block), slice(c, w, block))
    sx = _box_reflect(y, winsize)[sl]
    sy = _box_reflect(yn, winsize)[sl]
    mx = sx / area
    my = sy / area
    cov = _box_reflect(y * yn, winsize)[sl] - area * mx * my
    ssx = _box_reflect(y * y, winsize)[sl] - area * mx * mx
    ssy = _box_reflect(yn * yn, winsize)[sl] - area * my * my
    g, vv, _ = _channel_estimate(ssx, ssy, cov)
    vv = vv / area

    # covariance of all (overlapping) block vectors
    cols = []
    for j in range(block):
        for k in range(block):
            cols.append(y[k : h - (block - 1 - k), j : w - (block - 1 - j)].reshape(-1))
    temp = np.stack(cols)
    temp = temp - temp.mean(axis=1, keepdims=True)
    cu = temp @ temp.T / temp.shape[1]

    # multiplier field from non-overlapping blocks
    blocks = []
    for j in range(block):
        for k in range(block):
            blocks.append(y[k::block, j::block].reshape(-1))
    bt = np.stack(blocks)
    sol = np.linalg.lstsq(cu, bt, rcond=None)[0]
    ss = (sol * bt).sum(axis=0) / (block * block)
    ss = ss.reshape(h // block, w // block)
    lam = np.linalg.eigvalsh(cu)
    return g, vv, ss, lam


def _gsm_information(ref, dist, levels: int, orientations: int, pick, const: Constants):
    x, y = _planes(ref, dist)
    if pyramid.max_levels(x.shape) < levels:
        raise ValueError(f"image too small for a {levels}-level steerable pyramid")
    pr = pyramid.build(x, levels, orientations)
    pd = pyramid.build(y, levels, orientations)
    block = const.vif_block
    out = []
    for lev in range(levels):
        winsize = 2 ** (lev + 1) + 1
        offset = math.ceil(((winsize - 1) // 2) / block)
        for o in pick(orientations):
            g, vv, ss, lam = _gsm_subband(pr.bands[lev][o], pd.bands[lev][o], block, winsize)
            if offset:
                crop = (slice(offset, -offset), slice(offset, -offset))
                g, vv, ss = g[crop], vv[crop], ss[crop]
            out.append((g, vv, ss, np.maximum(lam, 0.0)))
    return x, y, out


def vif(ref, dist, const: Constants = DEFAULT_CONSTANTS) -> float:
    """Wavelet-domain VIF over two orientations per pyramid level."""

    def pick(k):
        return (k // 2 - 1, k - 1) if k >= 4 else tuple(range(k))

    x, y, bands = _gsm_information(ref, dist, const.vif_levels, const.vif_orientations, pick, const)
    sigma_nsq = const.vif_sigma_nsq
    num = 0.0
    den = 0.0
    for g, vv, ss, lam in bands:
        for lj in lam:
            num += float(np.sum(np.log2(1.0 + g * g * ss * lj / (vv + sigma_nsq))))
            den += float(np.sum(np.log2(1.0 + ss * lj / sigma_nsq)))
    return _ratio(num, den, x, y)


def ifc(ref, dist, const: Constants = DEFAULT_CONSTANTS) -> float:
    """Information fidelity criterion in bits; ``inf`` for identical inputs."""
    x, y = _planes(ref, dist)
    if np.array_equal(x, y):
        # no distortion channel noise: mutual information is unbounded
        return math.inf
    _, _, bands = _gsm_information(ref, dist, const.ifc_levels, const.vif_orientations,
                                   lambda k: tuple(range(k)), const)
    total = 0.0
    for g, vv, ss, lam in bands:
        vv = np.maximum(vv, _TOL)
        for lj in lam:
            total += float(np.sum(np.log2(1.0 + g * g * ss * lj / vv)))
    return total
