"""Image decoding, luminance conversion and the shared DSP primitives.

Luma planes are plain 2-D ``float64`` arrays on the 0-255 scale. Kernels are
2-D ``float64`` arrays with odd dimensions.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image as PILImage
from PIL import UnidentifiedImageError

from . import _core

# BT.601 luma weights; one project-wide constant
LUMA_WEIGHTS = (0.299, 0.587, 0.114)

BORDER_MODES = ("symmetric", "zero", "valid")

_GRADIENT_OPERATORS = {
    "sobel": np.array([[-1.0, 0.0, 1.0], [-2.0, 0.0, 2.0], [-1.0, 0.0, 1.0]]),
    "scharr": np.array([[-3.0, 0.0, 3.0], [-10.0, 0.0, 10.0], [-3.0, 0.0, 3.0]]),
    "prewitt": np.array([[-1.0, 0.0, 1.0], [-1.0, 0.0, 1.0], [-1.0, 0.0, 1.0]]),
}


class ImageDecodeError(ValueError):
    """Raised when a file cannot be decoded into an 8-bit image."""


@dataclass(frozen=True, eq=False)
class Image:
    """Decoded 8-bit raster, stored as a ``(height, width, channels)`` array."""

    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.ndim == 2:
            px = px[:, :, None]
        if px.ndim != 3 or px.shape[2] not in (1, 3):
            raise ValueError(f"expected HxW, HxWx1 or HxWx3 pixels, got shape {px.shape}")
        if px.shape[0] == 0 or px.shape[1] == 0:
            raise ValueError("image must be non-empty")
        if px.dtype != np.uint8:
            if not np.issubdtype(px.dtype, np.integer) or px.min() < 0 or px.max() > 255:
                raise ValueError("pixels must be 8-bit integers")
            px = px.astype(np.uint8)
        px = np.ascontiguousarray(px)
        px.setflags(write=False)
        object.__setattr__(self, "pixels", px)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def channels(self) -> int:
        return self.pixels.shape[2]

    @property
    def samples(self) -> np.ndarray:
        """Row-major, channel-interleaved sample vector."""
        return self.pixels.reshape(-1)

    def __eq__(self, other):
        if not isinstance(other, Image):
            return NotImplemented
        return self.pixels.shape == other.pixels.shape and bool(np.array_equal(self.pixels, other.pixels))

    __hash__ = None


def _png_bit_depth(head: bytes) -> int | None:
    if head[:8] != b"\x89PNG\r\n\x1a\n" or len(head) < 25 or head[12:16] != b"IHDR":
        return None
    return head[24]


def load_image(path: str | os.PathLike) -> Image:
    """Decode a PNG (or BMP) file into an 8-bit :class:`Image`.

    Alpha is dropped, palette images are expanded to RGB. Sources with more
    than 8 bits per sample are rejected rather than truncated.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such image file: {path}")
    with open(path, "rb") as fh:
        head = fh.read(32)
    depth = _png_bit_depth(head)
    if depth is not None and depth > 8:
        raise ImageDecodeError(f"{path}: {depth}-bit samples are not supported (8-bit only)")
    try:
        with PILImage.open(path) as im:
            im.load()
            mode = im.mode
            if mode in ("I;16", "I;16B", "I;16L", "I", "F"):
                raise ImageDecodeError(f"{path}: unsupported sample format {mode!r} (8-bit only)")
            if mode in ("1", "L", "LA"):
                arr = np.asarray(im.convert("L"))
            else:
                arr = np.asarray(im.convert("RGB"))
    except ImageDecodeError:
        raise
    except (UnidentifiedImageError, OSError, SyntaxError) as exc:
        raise ImageDecodeError(f"{path}: cannot decode image ({exc})") from exc
    return Image(arr)


def save_png(img: Image, path: str | os.PathLike) -> None:
    px = img.pixels[:, :, 0] if img.channels == 1 else img.pixels
    PILImage.fromarray(px).save(path, format="PNG")


def as_image(obj) -> Image:
    return obj if isinstance(obj, Image) else Image(np.asarray(obj))


def to_luminance(img) -> np.ndarray:
    """Luma plane (float64, 0-255) of an :class:`Image` or array.

    Real-valued 2-D arrays are taken to be luma already and are copied.
    """
    if isinstance(img, Image):
        px = img.pixels
    else:
        px = np.asarray(img)
        if px.ndim == 2:
            return np.array(px, dtype=np.float64)
    if px.ndim == 3 and px.shape[2] == 1:
        return px[:, :, 0].astype(np.float64)
    if px.ndim != 3 or px.shape[2] != 3:
        raise ValueError(f"unsupported channel layout {px.shape}")
    rgb = px.astype(np.float64)
    wr, wg, wb = LUMA_WEIGHTS
    y = wr * rgb[:, :, 0] + wg * rgb[:, :, 1] + wb * rgb[:, :, 2]
    return np.clip(y, 0.0, 255.0)


def to_rgb(img) -> np.ndarray:
    """Float64 HxWx3 array; single-channel input is replicated."""
    px = img.pixels if isinstance(img, Image) else np.asarray(img)
    if px.ndim == 2:
        px = px[:, :, None]
    if px.shape[2] == 1:
        px = np.repeat(px, 3, axis=2)
    if px.shape[2] != 3:
        raise ValueError(f"unsupported channel layout {px.shape}")
    return px.astype(np.float64)


def _check_kernel(k: np.ndarray, odd: bool = True) -> np.ndarray:
    k = np.asarray(k, dtype=np.float64)
    if k.ndim == 1:
        k = k[None, :]
    if k.ndim != 2 or k.size == 0:
        raise ValueError(f"kernel must be a non-empty 2-D array, got shape {k.shape}")
    if odd and (k.shape[0] % 2 == 0 or k.shape[1] % 2 == 0):
        raise ValueError(f"kernel dimensions must be odd, got {k.shape}")
    return k


def correlate(plane: np.ndarray, k: np.ndarray, border: str = "symmetric") -> np.ndarray:
    """Correlation (no kernel flip) of ``plane`` with ``k``.

    ``symmetric`` and ``zero`` give same-size output, ``valid`` only keeps
    positions where the kernel lies inside the plane.
    """
    plane = np.asarray(plane, dtype=np.float64)
    if border not in BORDER_MODES:
        raise ValueError(f"unknown border mode {border!r}")
    # even-sized windows only make sense without a centre, i.e. in valid mode
    k = _check_kernel(k, odd=border != "valid")
    kh, kw = k.shape
    h, w = plane.shape
    if border == "valid":
        if kh > h or kw > w:
            raise ValueError("kernel larger than plane for valid correlation")
        src = plane
    else:
        if max(kh, kw) > 2 * min(h, w):
            raise ValueError("kernel exceeds twice the smaller plane dimension")
        pad = ((kh // 2, kh // 2), (kw // 2, kw // 2))
        src = np.pad(plane, pad, mode="symmetric" if border == "symmetric" else "constant")
    return _core.correlate_valid(np.ascontiguousarray(src), np.ascontiguousarray(k))


def convolve(plane: np.ndarray, k: np.ndarray, border: str = "symmetric") -> np.ndarray:
    """2-D convolution; same-size output under ``symmetric``/``zero`` borders."""
    k = _check_kernel(k, odd=border != "valid")
    return correlate(plane, k[::-1, ::-1], border)


def correlate_separable(
    plane: np.ndarray, col: np.ndarray, row: np.ndarray, border: str = "symmetric"
) -> np.ndarray:
    """Same as ``correlate(plane, outer(col, row), border)`` in two 1-D passes."""
    col = np.asarray(col, dtype=np.float64).reshape(-1, 1)
    row = np.asarray(row, dtype=np.float64).reshape(1, -1)
    return correlate(correlate(plane, col, border), row, border)


def gaussian_taps(size: int, sigma: float) -> np.ndarray:
    """Normalized 1-D Gaussian; ``gaussian_window`` is its outer product."""
    if size < 1 or size % 2 == 0:
        raise ValueError("window size must be a positive odd integer")
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    r = np.arange(size, dtype=np.float64) - (size - 1) / 2
    g = np.exp(-(r**2) / (2.0 * sigma**2))
    return g / g.sum()


def gaussian_window(size: int, sigma: float) -> np.ndarray:
    g = gaussian_taps(size, sigma)
    w = np.outer(g, g)
    return w / w.sum()


def uniform_window(size: int) -> np.ndarray:
    if size < 1:
        raise ValueError("window size must be positive")
    return np.full((size, size), 1.0 / (size * size))


def downsample2(plane: np.ndarray) -> np.ndarray:
    """2x2 block mean; an odd trailing row/column is dropped."""
    plane = np.asarray(plane, dtype=np.float64)
    h, w = plane.shape
    if h < 2 or w < 2:
        raise ValueError("plane must be at least 2x2 to downsample")
    h2, w2 = h // 2, w // 2
    p = plane[: 2 * h2, : 2 * w2]
    return 0.25 * (p[0::2, 0::2] + p[1::2, 0::2] + p[0::2, 1::2] + p[1::2, 1::2])


def gradient_components(plane: np.ndarray, operator: str = "sobel") -> tuple[np.ndarray, np.ndarray]:
    try:
        kx = _GRADIENT_OPERATORS[operator]
    except KeyError:
        raise ValueError(f"unknown gradient operator {operator!r}") from None
    plane = np.asarray(plane, dtype=np.float64)
    if plane.shape[0] < 3 or plane.shape[1] < 3:
        raise ValueError("plane must be at least 3x3 for gradients")
    gx = correlate(plane, kx)
    gy = correlate(plane, kx.T)
    return gx, gy


def gradient_magnitude(plane: np.ndarray, operator: str = "sobel") -> np.ndarray:
    gx, gy = gradient_components(plane, operator)
    return np.sqrt(gx * gx + gy * gy)


def dft2(plane: np.ndarray) -> np.ndarray:
    """Unnormalized forward 2-D DFT."""
    return np.fft.fft2(np.asarray(plane, dtype=np.float64))


def idft2(spectrum: np.ndarray) -> np.ndarray:
    return np.fft.ifft2(spectrum)
