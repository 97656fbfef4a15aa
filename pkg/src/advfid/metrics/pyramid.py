"""Real steerable pyramid built in the Fourier domain.

Radial masks are raised-cosine transitions one octave wide, angular masks
are ``cos(theta - pi*b/K) ** (K-1)``. The decomposition is a tight frame, so
``reconstruct(build(x)) == x`` up to rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass
class SteerablePyramid:
    highpass: np.ndarray
    bands: list[list[np.ndarray]]  # bands[level][orientation], level 0 is finest
    lowpass: np.ndarray
    orientations: int

    @property
    def levels(self) -> int:
        return len(self.bands)


def _grids(shape: tuple[int, int]) -> tuple[np.ndarray, np.ndarray]:
    m, n = shape
    ctr = (m // 2, n // 2)
    xr = (np.arange(n) - ctr[1]) / (n / 2.0)
    yr = (np.arange(m) - ctr[0]) / (m / 2.0)
    xx, yy = np.meshgrid(xr, yr)
    angle = np.arctan2(yy, xx)
    rad = np.sqrt(xx * xx + yy * yy)
    rad[ctr] = rad[ctr[0], ctr[1] - 1] if n > 1 else rad[ctr[0] - 1, ctr[1]]
    return np.log2(rad), angle


def _hi_mask(log_rad: np.ndarray, shift: float) -> np.ndarray:
    t = np.clip(log_rad - shift, -1.0, 0.0)
    return np.abs(np.cos(0.5 * math.pi * t))


def _lo_mask(log_rad: np.ndarray, shift: float) -> np.ndarray:
    t = np.clip(log_rad - shift, -1.0, 0.0)
    return np.abs(np.sin(0.5 * math.pi * t))


def _angle_const(order: int, nbands: int) -> float:
    return math.sqrt((2 ** (2 * order)) * math.factorial(order) ** 2 / (nbands * math.factorial(2 * order)))


def max_levels(shape: tuple[int, int]) -> int:
    return max(int(math.floor(math.log2(min(shape)))) - 2, 0)


def build(image: np.ndarray, levels: int, orientations: int = 6) -> SteerablePyramid:
    image = np.asarray(image, dtype=np.float64)
    if levels < 1 or levels > max_levels(image.shape):
        raise ValueError(f"cannot build {levels} pyramid levels on a {image.shape} image")
    order = orientations - 1
    log_rad, angle = _grids(image.shape)
    imdft = np.fft.fftshift(np.fft.fft2(image))
    hi0 = np.real(np.fft.ifft2(np.fft.ifftshift(imdft * _hi_mask(log_rad, 0.0))))
    lodft = imdft * _lo_mask(log_rad, 0.0)
    const = _angle_const(order, orientations)
    phase = (-1j) ** order
    bands: list[list[np.ndarray]] = []
    for _ in range(levels):
        # each level sits one octave below the previous, on a half-size grid
        himask = _hi_mask(log_rad, -1.0)
        level = []
        for b in range(orientations):
            amask = const * np.cos(angle - math.pi * b / orientations) ** order
            banddft = phase * lodft * amask * himask
            level.append(np.real(np.fft.ifft2(np.fft.ifftshift(banddft))))
        bands.append(level)
        dims = np.array(lodft.shape)
        ctr = dims // 2
        lodims = np.ceil((dims - 0.5) / 2).astype(int)
        start = ctr - lodims // 2
        sl = (slice(start[0], start[0] + lodims[0]), slice(start[1], start[1] + lodims[1]))
        log_rad = log_rad[sl] + 1.0
        angle = angle[sl]
        lodft = lodft[sl] * _lo_mask(log_rad, 0.0)
    lowpass = np.real(np.fft.ifft2(np.fft.ifftshift(lodft)))
    return SteerablePyramid(hi0, bands, lowpass, orientations)


def reconstruct(pyr: SteerablePyramid) -> np.ndarray:
    order = pyr.orientations - 1
    const = _angle_const(order, pyr.orientations)
    phase = (1j) ** order
    shape = pyr.highpass.shape
    # rebuild the chain of grids top-down
    grids = []
    log_rad, angle = _grids(shape)
    for _ in range(pyr.levels):
        grids.append((log_rad, angle))
        dims = np.array(log_rad.shape)
        ctr = dims // 2
        lodims = np.ceil((dims - 0.5) / 2).astype(int)
        start = ctr - lodims // 2
        sl = (slice(start[0], start[0] + lodims[0]), slice(start[1], start[1] + lodims[1]))
        log_rad = log_rad[sl] + 1.0
        angle = angle[sl]
    lodft = np.fft.fftshift(np.fft.fft2(pyr.lowpass)) * _lo_mask(log_rad, 0.0)
    for lev in range(pyr.levels - 1, -1, -1):
        log_rad, angle = grids[lev]
        up = np.zeros(log_rad.shape, dtype=complex)
        dims = np.array(log_rad.shape)
        ctr = dims // 2
        lodims = np.array(lodft.shape)
        start = ctr - lodims // 2
        up[start[0] : start[0] + lodims[0], start[1] : start[1] + lodims[1]] = lodft
        himask = _hi_mask(log_rad, -1.0)
        for b, band in enumerate(pyr.bands[lev]):
            amask = const * np.cos(angle - math.pi * b / pyr.orientations) ** order
            up += phase * np.fft.fftshift(np.fft.fft2(band)) * amask * himask
        lodft = up
        if lev > 0:
            lodft = lodft * _lo_mask(log_rad, 0.0)
    log_rad, _ = _grids(shape)
    out = lodft * _lo_mask(log_rad, 0.0) + np.fft.fftshift(np.fft.fft2(pyr.highpass)) * _hi_mask(log_rad, 0.0)
    return np.real(np.fft.ifft2(np.fft.ifftshift(out)))
