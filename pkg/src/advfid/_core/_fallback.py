"""Pure numpy versions of the compiled kernels in ``_kernels.pyx``."""

from __future__ import annotations

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view


def correlate_valid(src: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    h, w = src.shape
    kh, kw = kernel.shape
    if kh > h or kw > w:
        raise ValueError("kernel larger than input")
    oh, ow = h - kh + 1, w - kw + 1
    out = np.zeros((oh, ow), dtype=np.float64)
    for a in range(kh):
        for b in range(kw):
            kv = kernel[a, b]
            if kv == 0.0:
                continue
            out += kv * src[a : a + oh, b : b + ow]
    return out


def block_moments(src: np.ndarray, block: int, step: int):
    h, w = src.shape
    if block < 1 or step < 1:
        raise ValueError("block and step must be positive")
    if block > h or block > w:
        raise ValueError("block larger than input")
    win = sliding_window_view(src, (block, block))[::step, ::step]
    mu = win.mean(axis=(-2, -1))
    d = win - mu[..., None, None]
    d2 = d * d
    m2 = d2.mean(axis=(-2, -1))
    m3 = (d2 * d).mean(axis=(-2, -1))
    m4 = (d2 * d2).mean(axis=(-2, -1))
    std = np.sqrt(m2)
    skew = np.zeros_like(m2)
    kurt = np.zeros_like(m2)
    pos = m2 > 0.0
    skew[pos] = m3[pos] / (m2[pos] * std[pos])
    kurt[pos] = m4[pos] / (m2[pos] * m2[pos])
    return mu, std, skew, kurt


def average_ranks(values: np.ndarray) -> np.ndarray:
    values = np.asarray(values, dtype=np.float64)
    n = values.shape[0]
    order = np.argsort(values, kind="mergesort")
    ranks = np.empty(n, dtype=np.float64)
    if n == 0:
        return ranks
    sorted_vals = values[order]
    # start index of each run of equal values
    starts = np.flatnonzero(np.r_[True, sorted_vals[1:] != sorted_vals[:-1]])
    ends = np.r_[starts[1:], n] - 1
    run_rank = 0.5 * (starts + ends) + 1.0
    ranks[order] = np.repeat(run_rank, ends - starts + 1)
    return ranks
