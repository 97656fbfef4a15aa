"""Hot inner loops, compiled when available.

The Cython module ``_kernels`` is preferred. If it was not built, or if
``ADVFID_PURE_PYTHON`` is set to a non-empty value other than ``0``, the
numpy implementations in ``_fallback`` are used instead. ``BACKEND`` names
the active choice.
"""

from __future__ import annotations

import os

import numpy as np

from . import _fallback

_forced = os.environ.get("ADVFID_PURE_PYTHON", "") not in ("", "0")

try:
    if _forced:
        raise ImportError("pure-python backend requested")
    from . import _kernels as _impl

    BACKEND = "cython"
except ImportError:
    _impl = _fallback
    BACKEND = "python"


def compiled_available() -> bool:
    try:
        from . import _kernels  # noqa: F401
    except ImportError:
        return False
    return True


def _c(a):
    # the compiled signatures take C-contiguous float64 memoryviews
    return np.ascontiguousarray(a, dtype=np.float64)


def correlate_valid(src, kernel):
    return _impl.correlate_valid(_c(src), _c(kernel))


def block_moments(src, block: int, step: int):
    return _impl.block_moments(_c(src), block, step)


def average_ranks(values):
    return _impl.average_ranks(_c(values))

__all__ = ["BACKEND", "average_ranks", "block_moments", "compiled_available", "correlate_valid"]
