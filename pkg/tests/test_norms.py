import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from advfid.imaging import Image
from advfid.norms import l0_norm, l2_norm, linf_norm, perturbation


def loop_l0(a, b):
    h, w, c = a.shape
    n = 0
    for i in range(h):
        for j in range(w):
            if any(int(a[i, j, k]) != int(b[i, j, k]) for k in range(c)):
                n += 1
    return n


def loop_l2(a, b):
    acc = 0.0
    for u, v in zip(a.reshape(-1), b.reshape(-1)):
        acc += (int(u) / 255.0 - int(v) / 255.0) ** 2
    return math.sqrt(acc)


def loop_linf(a, b):
    return max(abs(int(u) / 255.0 - int(v) / 255.0) for u, v in zip(a.reshape(-1), b.reshape(-1)))


def test_identical(rng):
    x = Image(rng.integers(0, 256, (6, 5, 3), dtype=np.uint8))
    assert l0_norm(x, x) == 0 and l2_norm(x, x) == 0.0 and linf_norm(x, x) == 0.0


def test_single_red_change():
    a = np.zeros((4, 4, 3), np.uint8)
    b = a.copy()
    b[1, 2, 0] = 9
    assert l0_norm(Image(a), Image(b)) == 1
    assert l0_norm(Image(a), Image(b), per_sample=True) == 1


def test_pixels_not_samples():
    a = np.zeros((4, 4, 3), np.uint8)
    b = a.copy()
    b[1, 2, :] = 9
    assert l0_norm(Image(a), Image(b)) == 1
    assert l0_norm(Image(a), Image(b), per_sample=True) == 3


def test_unit_impulse():
    a = np.zeros((3, 3, 1), np.uint8)
    b = a.copy()
    b[0, 0, 0] = 255
    assert l2_norm(Image(a), Image(b)) == 1.0


def test_linf_single():
    a = np.full((3, 3, 3), 100, np.uint8)
    b = a.copy()
    b[2, 1, 1] = 113
    assert linf_norm(Image(a), Image(b)) == pytest.approx(13 / 255, abs=1e-15)
    assert round(13 / 255, 5) == 0.05098


def test_scale_recorded(rng):
    a = Image(rng.integers(0, 256, (3, 3, 3), dtype=np.uint8))
    b = Image(rng.integers(0, 256, (3, 3, 3), dtype=np.uint8))
    v = perturbation(a, b)
    assert v.scale == "0-1" and v.n == 27
    assert l2_norm(a, b, scale="0-255") == pytest.approx(255 * l2_norm(a, b))


def test_shape_mismatch():
    with pytest.raises(ValueError):
        l0_norm(Image(np.zeros((2, 2, 3), np.uint8)), Image(np.zeros((2, 3, 3), np.uint8)))
    with pytest.raises(ValueError):
        l2_norm(Image(np.zeros((2, 2, 3), np.uint8)), Image(np.zeros((2, 2, 1), np.uint8)))


def test_random_oracles(rng):
    for _ in range(25):
        shape = (int(rng.integers(1, 6)), int(rng.integers(1, 6)), int(rng.choice([1, 3])))
        a = rng.integers(0, 256, shape, dtype=np.uint8)
        b = a.copy()
        mask = rng.random(shape) < 0.3
        b[mask] = rng.integers(0, 256, mask.sum(), dtype=np.uint8)
        assert l0_norm(Image(a), Image(b)) == loop_l0(a, b)
        assert math.isclose(l2_norm(Image(a), Image(b)), loop_l2(a, b), rel_tol=1e-12, abs_tol=1e-15)
        assert math.isclose(linf_norm(Image(a), Image(b)), loop_linf(a, b), rel_tol=1e-12, abs_tol=1e-15)


pairs = st.integers(1, 5).flatmap(
    lambda h: st.tuples(arrays(np.uint8, (h, 4, 3)), arrays(np.uint8, (h, 4, 3))))


@settings(max_examples=80, deadline=None)
@given(pairs)
def test_norm_properties(pair):
    a, b = (Image(p) for p in pair)
    l2, li = l2_norm(a, b), linf_norm(a, b)
    n = a.samples.size
    assert li <= l2 + 1e-12 and l2 <= math.sqrt(n) * li + 1e-12
    assert l0_norm(a, b) == l0_norm(b, a) and l2 == l2_norm(b, a) and li == linf_norm(b, a)
    zero = np.array_equal(pair[0], pair[1])
    assert (l0_norm(a, b) == 0) == zero and (l2 == 0) == zero and (li == 0) == zero


@settings(max_examples=40, deadline=None)
@given(pairs, st.integers(0, 2**31 - 1))
def test_l0_monotone_remap_invariance(pair, seed):
    # strictly increasing per-channel lookup tables, same for both images
    r = np.random.default_rng(seed)
    luts = [np.sort(r.choice(4096, 256, replace=False)) for _ in range(3)]

    def remap(px):
        return np.stack([luts[c][px[:, :, c]] for c in range(3)], axis=2)

    a, b = pair
    assert l0_norm(Image(a), Image(b)) == loop_l0(remap(a), remap(b))
