"""CDF 9/7 discrete wavelet transform via lifting, with symmetric extension."""

from __future__ import annotations

import numpy as np

_ALPHA = -1.586134342059924
_BETA = -0.052980118572961
_GAMMA = 0.882911075530934
_DELTA = 0.443506852043971
_K = 1.230174104914001


def _right(s: np.ndarray, m: int) -> np.ndarray:
    """s[n+1] for n < m, mirrored at the end."""
    nxt = np.empty((m,) + s.shape[1:], dtype=s.dtype)
    k = min(m, s.shape[0] - 1)
    nxt[:k] = s[1 : k + 1]
    if k < m:
        nxt[k:] = s[s.shape[0] - 1 : s.shape[0]]
    return nxt


def _left(d: np.ndarray, m: int) -> np.ndarray:
    """d[n-1] + d[n] for n < m, mirrored at both ends."""
    cur = np.empty((m,) + d.shape[1:], dtype=d.dtype)
    k = min(m, d.shape[0])
    cur[:k] = d[:k]
    if k < m:
        cur[k:] = d[-1:]
    prev = np.empty_like(cur)
    prev[0] = d[0]
    prev[1:] = cur[:-1] if m > 1 else prev[1:]
    return prev + cur


def dwt1(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """One level along axis 0. Length must be at least 2."""
    if x.shape[0] < 2:
        raise ValueError("signal too short for a wavelet step")
    s = x[0::2].astype(np.float64)
    d = x[1::2].astype(np.float64)
    ns, nd = s.shape[0], d.shape[0]
    d = d + _ALPHA * (s[:nd] + _right(s, nd))
    s = s + _BETA * _left(d, ns)
    d = d + _GAMMA * (s[:nd] + _right(s, nd))
    s = s + _DELTA * _left(d, ns)
    return s * _K, d / _K


def idwt1(s: np.ndarray, d: np.ndarray) -> np.ndarray:
    s = s / _K
    d = d * _K
    ns, nd = s.shape[0], d.shape[0]
    s = s - _DELTA * _left(d, ns)
    d = d - _GAMMA * (s[:nd] + _right(s, nd))
    s = s - _BETA * _left(d, ns)
    d = d - _ALPHA * (s[:nd] + _right(s, nd))
    out = np.empty((ns + nd,) + s.shape[1:], dtype=np.float64)
    out[0::2] = s
    out[1::2] = d
    return out


def dwt2(p: np.ndarray):
    """One 2-D level: (LL, (LH, HL, HH))."""
    lo, hi = dwt1(p)
    ll, lh = dwt1(lo.T)
    hl, hh = dwt1(hi.T)
    return ll.T, (lh.T, hl.T, hh.T)


def idwt2(ll: np.ndarray, details) -> np.ndarray:
    lh, hl, hh = details
    lo = idwt1(ll.T, lh.T).T
    hi = idwt1(hl.T, hh.T).T
    return idwt1(lo, hi)


def wavedec2(p: np.ndarray, levels: int):
    """Returns (approximation, [details finest..coarsest])."""
    out = []
    a = np.asarray(p, dtype=np.float64)
    for _ in range(levels):
        a, det = dwt2(a)
        out.append(det)
    return a, out


def waverec2(a: np.ndarray, details) -> np.ndarray:
    for det in reversed(details):
        a = idwt2(a, det)
    return a
