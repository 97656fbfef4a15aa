# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops. Signatures and results mirror ``_fallback``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()


def correlate_valid(const double[:, ::1] src, const double[:, ::1] kernel):
    cdef Py_ssize_t h = src.shape[0], w = src.shape[1]
    cdef Py_ssize_t kh = kernel.shape[0], kw = kernel.shape[1]
    if kh > h or kw > w:
        raise ValueError("kernel larger than input")
    cdef Py_ssize_t oh = h - kh + 1, ow = w - kw + 1
    out_arr = np.zeros((oh, ow), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t i, j, a, b
    cdef double kv
    # tap-outer ordering keeps the inner loop contiguous in both src and out
    for a in range(kh):
        for b in range(kw):
            kv = kernel[a, b]
            if kv == 0.0:
                continue
            for i in range(oh):
                for j in range(ow):
                    out[i, j] += kv * src[i + a, j + b]
    return out_arr


def block_moments(const double[:, ::1] src, Py_ssize_t block, Py_ssize_t step):
    cdef Py_ssize_t h = src.shape[0], w = src.shape[1]
    if block < 1 or step < 1:
        raise ValueError("block and step must be positive")
    if block > h or block > w:
        raise ValueError("block larger than input")
    cdef Py_ssize_t nr = (h - block) // step + 1
    cdef Py_ssize_t nc = (w - block) // step + 1
    mean_arr = np.empty((nr, nc), dtype=np.float64)
    std_arr = np.empty((nr, nc), dtype=np.float64)
    skew_arr = np.empty((nr, nc), dtype=np.float64)
    kurt_arr = np.empty((nr, nc), dtype=np.float64)
    cdef double[:, ::1] mean_v = mean_arr
    cdef double[:, ::1] std_v = std_arr
    cdef double[:, ::1] skew_v = skew_arr
    cdef double[:, ::1] kurt_v = kurt_arr
    cdef Py_ssize_t r, c, i, j, r0, c0
    cdef double n = <double>(block * block)
    cdef double s, mu, d, d2, m2, m3, m4
    for r in range(nr):
        r0 = r * step
        for c in range(nc):
            c0 = c * step
            s = 0.0
            for i in range(block):
                for j in range(block):
                    s += src[r0 + i, c0 + j]
            mu = s / n
            m2 = 0.0
            m3 = 0.0
            m4 = 0.0
            for i in range(block):
                for j in range(block):
                    d = src[r0 + i, c0 + j] - mu
                    d2 = d * d
                    m2 += d2
                    m3 += d2 * d
                    m4 += d2 * d2
            m2 /= n
            m3 /= n
            m4 /= n
            mean_v[r, c] = mu
            std_v[r, c] = sqrt(m2)
            if m2 > 0.0:
                skew_v[r, c] = m3 / (m2 * sqrt(m2))
                kurt_v[r, c] = m4 / (m2 * m2)
            else:
                skew_v[r, c] = 0.0
                kurt_v[r, c] = 0.0
    return mean_arr, std_arr, skew_arr, kurt_arr


def average_ranks(const double[::1] values):
    cdef Py_ssize_t n = values.shape[0]
    order_arr = np.argsort(np.asarray(values), kind="mergesort")
    cdef cnp.intp_t[::1] order = order_arr
    ranks_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] ranks = ranks_arr
    cdef Py_ssize_t i = 0, j, k
    cdef double avg
    while i < n:
        j = i
        while j + 1 < n and values[order[j + 1]] == values[order[i]]:
            j += 1
        # 1-based ranks; ties share the mean of positions i..j
        avg = 0.5 * (i + j) + 1.0
        for k in range(i, j + 1):
            ranks[order[k]] = avg
        i = j + 1
    return ranks_arr
