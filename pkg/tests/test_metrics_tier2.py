import math

import numpy as np
import pytest

from advfid.imaging import Image, to_luminance
from advfid.metrics import TIER2, MetricId, MetricNotEnabledError, compute_tier2, score_all
from advfid.metrics import pyramid, wavelet
from advfid.metrics.fsim import fsim, fsimc, phase_congruency
from advfid.metrics.mad import mad, mad_detail
from advfid.metrics.nqm import nqm
from advfid.metrics.vif import ifc, vif
from advfid.metrics.vsi import vsi
from advfid.metrics.vsnr import vsnr

from conftest import add_noise, make_content


@pytest.mark.parametrize("metric", TIER2, ids=lambda m: m.label)
def test_identity_perfect(metric, content):
    s = compute_tier2(metric, content, content, enabled=TIER2)
    assert s.value == metric.perfect


@pytest.mark.parametrize("metric", TIER2, ids=lambda m: m.label)
def test_not_enabled(metric, content):
    with pytest.raises(MetricNotEnabledError, match="not enabled"):
        compute_tier2(metric, content, content)


def test_score_all_reports_disabled(content):
    scores = score_all(content, content, [MetricId.FSIM, MetricId.PSNR])
    assert [s.metric for s in scores] == [MetricId.FSIM, MetricId.PSNR]
    assert not scores[0].ok and "not enabled" in scores[0].error
    assert scores[1].ok


def test_fsimc_equals_fsim_on_gray(content):
    y = np.round(to_luminance(content)).astype(np.uint8)
    gray = Image(np.repeat(y[:, :, None], 3, axis=2))
    noisy = add_noise(Image(y[:, :, None]), 10)
    noisy = Image(np.repeat(noisy.pixels, 3, axis=2))
    assert fsimc(gray, noisy) == pytest.approx(fsim(gray, noisy), abs=1e-12)


@pytest.mark.parametrize("fn", [fsim, fsimc, vsi, vif])
def test_similarity_decreases(fn, content):
    vals = [fn(content, add_noise(content, s)) for s in (5, 20, 40)]
    assert vals[0] > vals[1] > vals[2]
    assert all(0 < v < 1 for v in vals)


@pytest.mark.parametrize("fn", [nqm, vsnr])
def test_snr_type_decreases(fn):
    img = make_content("texture")
    vals = [fn(img, add_noise(img, s)) for s in (5, 20, 40)]
    assert vals[0] > vals[1] > vals[2]


def test_mad_increases_with_noise():
    img = make_content("gradient")
    vals = [mad(img, add_noise(img, s)) for s in (5, 20, 40)]
    assert 0 <= vals[0] < vals[1] < vals[2]


def test_mad_detail_blend():
    img = make_content("edges")
    value, detect, appear = mad_detail(img, add_noise(img, 20))
    assert detect > 0 and appear > 0
    # the blend is a weighted geometric mean, so it lies between its two stages
    assert min(detect, appear) <= value <= max(detect, appear)


def test_ifc_unnormalized(content):
    assert ifc(content, add_noise(content, 5)) > ifc(content, add_noise(content, 20)) > 0
    assert ifc(content, content) == math.inf


@pytest.mark.parametrize("fn", [nqm, ifc, mad])
def test_directional(fn):
    img = make_content("texture")
    noisy = add_noise(img, 25)
    assert abs(fn(img, noisy) - fn(noisy, img)) > 1e-6


def test_phase_congruency_range(content):
    pc = phase_congruency(to_luminance(content))
    assert pc.shape == (content.height, content.width)
    assert pc.min() >= 0 and pc.max() <= 1
    assert np.all(phase_congruency(np.full((32, 32), 80.0)) == 0)


class TestSteerablePyramid:
    @pytest.mark.parametrize("shape", [(64, 64), (80, 96)])
    def test_reconstruction(self, rng, shape):
        x = rng.normal(size=shape)
        pyr = pyramid.build(x, levels=3, orientations=6)
        assert np.allclose(pyramid.reconstruct(pyr), x, atol=1e-10)

    def test_too_many_levels(self):
        with pytest.raises(ValueError):
            pyramid.build(np.zeros((16, 16)), levels=10)


class TestWavelet:
    @pytest.mark.parametrize("shape", [(64, 64), (37, 50), (9, 4)])
    def test_perfect_reconstruction(self, rng, shape):
        x = rng.normal(size=shape)
        levels = 2 if min(shape) >= 8 else 1
        a, details = wavelet.wavedec2(x, levels)
        assert np.allclose(wavelet.waverec2(a, details), x, atol=1e-10)

    def test_constant_has_no_detail(self):
        a, details = wavelet.wavedec2(np.full((32, 32), 7.0), 3)
        for band in details:
            for d in band:
                assert np.abs(d).max() < 1e-10


@pytest.mark.parametrize("fn,side", [(fsim, 2), (vsi, 2), (nqm, 6), (vsnr, 6), (mad, 6), (vif, 6), (ifc, 6)])
def test_too_small(fn, side):
    tiny = Image(np.random.default_rng(0).integers(0, 256, (side, side, 3), dtype=np.uint8))
    with pytest.raises(ValueError):
        fn(tiny, add_noise(tiny, 5))


def test_vsnr_black_reference():
    with pytest.raises(ValueError):
        vsnr(np.zeros((64, 64)), np.full((64, 64), 95.0))
