import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from advfid.stats import (
    PerformanceReport, clamp_unbounded, evaluate_metric, fit_logistic5, logistic5, outlier_ratio, plcc,
    rmse, srocc,
)
from advfid.subjective import MosRecord

BETA = np.array([2.0, 1.0, 0.0, 0.5, 3.0])


def records(values, ci=0.3):
    return [MosRecord(f"x{i:03d}", float(v), ci, 10) for i, v in enumerate(values)]


class TestFit:
    def test_noiseless_recovery(self):
        x = np.linspace(-5, 5, 50)
        y = logistic5(x, BETA)
        params, diag = fit_logistic5(x, y)
        assert rmse(params(x), y) < 1e-6
        assert diag.converged and diag.residual_rmse < 1e-6

    def test_linear(self):
        x = np.linspace(0, 10, 30)
        params, diag = fit_logistic5(x, 2 * x + 1)
        assert rmse(params(x), 2 * x + 1) < 1e-8

    def test_noisy(self, rng):
        x = np.linspace(-5, 5, 50)
        y = logistic5(x, BETA) + rng.normal(0, 0.1, 50)
        params, _ = fit_logistic5(x, y)
        assert rmse(params(x), y) <= 0.12

    def test_decreasing(self, rng):
        x = rng.uniform(0, 1, 40)
        y = 5 - 4 * x ** 2 + rng.normal(0, 0.05, 40)
        params, _ = fit_logistic5(x, y)
        assert plcc(params(x), y) >= abs(plcc(x, y))

    @pytest.mark.parametrize("x,y", [
        (np.arange(5.0), np.arange(5.0)),
        (np.ones(10), np.arange(10.0)),
        (np.array([0, 1, 2, 3, 4, np.inf]), np.arange(6.0)),
    ])
    def test_preconditions(self, x, y):
        with pytest.raises(ValueError):
            fit_logistic5(x, y)


class TestCorrelations:
    def test_plcc(self):
        x = np.arange(10.0)
        assert plcc(x, 3 * x - 7) == pytest.approx(1.0, abs=1e-15)
        assert plcc(x, -x) == pytest.approx(-1.0, abs=1e-15)

    def test_srocc(self):
        x = np.linspace(-2, 3, 20)
        assert srocc(x, np.exp(x)) == 1.0
        assert srocc(x, x[::-1]) == -1.0

    def test_srocc_ties(self):
        # oracle: Pearson of hand-assigned average ranks
        x = [1, 2, 2, 3]
        y = [1, 3, 2, 4]
        assert srocc(x, y) == pytest.approx(plcc([1, 2.5, 2.5, 4], [1, 3, 2, 4]))

    def test_constant_rejected(self):
        with pytest.raises(ValueError):
            plcc([1, 1, 1], [1, 2, 3])

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 2**31 - 1), st.floats(0.1, 10), st.floats(-10, 10))
    def test_affine_invariance(self, seed, a, b):
        r = np.random.default_rng(seed)
        x, y = r.normal(size=(2, 30))
        assert plcc(a * x + b, y) == pytest.approx(plcc(x, y), abs=1e-6)
        assert srocc(a * x + b, y) == srocc(x, y)


class TestErrors:
    def test_rmse(self):
        y = np.arange(6.0)
        assert rmse(y, y) == 0.0
        assert rmse(y + np.array([0.5, -0.5] * 3), y) == 0.5

    def test_outlier_ratio(self):
        mos = np.array([3.0, 3.0, 3.0, 3.0])
        ci = np.array([0.2, 0.2, 0.5, 0.5])
        assert outlier_ratio(mos, mos, ci) == (0.0, False)
        pred = np.array([3.3, 3.1, 3.6, 3.4])
        assert outlier_ratio(pred, mos, ci) == (0.5, False)

    def test_outlier_fallback(self):
        mos = np.array([3.0, 3.0])
        ci = np.array([math.inf, 0.2])
        with pytest.raises(ValueError):
            outlier_ratio(mos, mos, ci)
        assert outlier_ratio(np.array([3.4, 3.4]), mos, ci, 0.5) == (0.5, True)


class TestEvaluate:
    def test_scores_equal_mos(self, rng):
        mos = rng.uniform(1, 5, 40)
        row = evaluate_metric("m", {f"x{i:03d}": v for i, v in enumerate(mos)}, records(mos))
        assert row.error is None
        assert row.plcc == pytest.approx(1.0, abs=1e-9)
        assert row.rmse == pytest.approx(0.0, abs=1e-7)
        assert row.outlier_ratio == 0.0

    def test_negated_scores(self, rng):
        mos = rng.uniform(1, 5, 40)
        row = evaluate_metric("m", {f"x{i:03d}": -v for i, v in enumerate(mos)}, records(mos))
        assert row.srocc == -1.0
        assert row.plcc == pytest.approx(1.0, abs=1e-6)
        assert row.params.beta[3] < 0 or row.params.beta[0] * row.params.beta[1] < 0

    def test_unbounded_clamped(self, rng):
        mos = np.sort(rng.uniform(1, 5, 20))
        scores = {f"x{i:03d}": 20 + 3 * v for i, v in enumerate(mos)}
        scores["x019"] = math.inf
        row = evaluate_metric("PSNR", scores, records(mos))
        assert row.error is None and "unbounded-clamped" in row.flags

    def test_join_mismatch(self):
        with pytest.raises(ValueError, match="join"):
            evaluate_metric("m", {"a": 1.0}, records([3.0]))

    def test_failed_pairs_reported(self, rng):
        mos = rng.uniform(1, 5, 10)
        scores = {f"x{i:03d}": v for i, v in enumerate(mos)}
        scores["x003"] = math.nan
        row = evaluate_metric("m", scores, records(mos))
        assert row.error and not row.fitted

    def test_report_serialization(self, rng):
        mos = rng.uniform(1, 5, 12)
        row = evaluate_metric("SSIM", {f"x{i:03d}": v for i, v in enumerate(mos)}, records(mos))
        rep = PerformanceReport([row])
        (csv_row,) = rep.csv_rows()
        assert len(csv_row) == len(PerformanceReport.CSV_HEADER) and csv_row[0] == "SSIM"
        assert rep.to_json()[0]["n"] == 12


def test_clamp_unbounded():
    out, flag = clamp_unbounded(np.array([30.0, math.inf, 40.0]))
    assert flag and out.tolist() == [30.0, 41.0, 40.0]
    assert clamp_unbounded(np.array([1.0]))[1] is False
    with pytest.raises(ValueError):
        clamp_unbounded(np.array([math.inf]))
