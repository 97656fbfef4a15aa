import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from advfid.subjective import (
    MosRecord, RatingsFormatError, SubjectScoreMatrix, mos, mos_histogram, read_raw_scores,
    screen_outliers, t_quantile,
)


def matrix(scores):
    s = np.asarray(scores)
    return SubjectScoreMatrix(s, tuple(f"s{i}" for i in range(s.shape[0])),
                              tuple(f"x{j}" for j in range(s.shape[1])))


def outlier_fixture(n_stimuli=40, high=5, low=1):
    """17 consistent subjects (near-normal spread per stimulus) plus one who swings both ways."""
    others = np.array([2] * 4 + [3] * 9 + [4] * 4)
    cols = [np.append(np.roll(others, j), high if j % 2 == 0 else low) for j in range(n_stimuli)]
    return matrix(np.array(cols).T)


class TestMos:
    def test_three_ratings(self):
        (r,) = mos(matrix([[5], [5], [4]]))
        assert r.mos == pytest.approx(4.6667, abs=1e-3)
        assert r.n_subjects == 3

    def test_five_grades(self):
        (r,) = mos(matrix([[1], [2], [3], [4], [5]]))
        assert r.mos == 3.0
        assert r.ci95 == pytest.approx(1.963, abs=1e-3)
        assert r.ci95 == pytest.approx(t_quantile(5) * math.sqrt(2.5) / math.sqrt(5), rel=1e-12)

    def test_t_quantile(self):
        assert t_quantile(5) == pytest.approx(2.776, abs=1e-3)
        with pytest.raises(ValueError):
            t_quantile(1)

    def test_identical_ratings(self):
        assert all(r.ci95 == 0.0 for r in mos(matrix([[3, 4], [3, 4], [3, 4]])))

    def test_single_subject(self):
        (r,) = mos(matrix([[4]]))
        assert r.mos == 4.0 and r.ci95 == math.inf

    @settings(max_examples=50, deadline=None)
    @given(arrays(np.int64, st.tuples(st.integers(2, 8), st.integers(1, 6)), elements=st.integers(1, 5)),
           st.integers(0, 2**31 - 1))
    def test_subject_order_invariance(self, scores, seed):
        perm = np.random.default_rng(seed).permutation(scores.shape[0])
        a = mos(matrix(scores))
        b = mos(matrix(scores[perm]))
        for x, y in zip(a, b):
            assert x.mos == pytest.approx(y.mos, abs=1e-12)
            assert x.ci95 == pytest.approx(y.ci95, abs=1e-12)
            assert 1 <= x.mos <= 5 and x.ci95 >= 0


class TestScreening:
    def test_two_condition_rejection(self):
        m = outlier_fixture()
        kept, rejected = screen_outliers(m)
        assert rejected == ["s17"]
        assert kept.n_subjects == 17 and "s17" not in kept.subject_ids

    def test_fixture_preconditions(self):
        # the stimuli look normally distributed, so the 2-sigma band applies
        u = outlier_fixture().scores.astype(float)
        d = u - u.mean(axis=0)
        beta2 = (d ** 4).mean(axis=0) / (d ** 2).mean(axis=0) ** 2
        assert np.all((beta2 >= 2) & (beta2 <= 4))
        assert np.all(np.abs(d[17]) >= 2 * u.std(axis=0, ddof=1))

    def test_one_sided_deviation_kept(self):
        # always high: P and Q are unbalanced, so the subject is biased, not inconsistent
        _, rejected = screen_outliers(outlier_fixture(high=5, low=5))
        assert rejected == []

    def test_all_agree(self):
        _, rejected = screen_outliers(matrix(np.tile([[1, 3, 5, 4, 2]], (12, 1))))
        assert rejected == []

    def test_needs_three_subjects(self):
        with pytest.raises(ValueError):
            screen_outliers(matrix([[1, 2], [3, 4]]))

    @settings(max_examples=30, deadline=None)
    @given(arrays(np.int64, (10, 8), elements=st.integers(1, 5)))
    def test_rejections_are_subjects(self, scores):
        kept, rejected = screen_outliers(matrix(scores))
        assert kept.n_subjects + len(rejected) == 10
        assert set(rejected).isdisjoint(kept.subject_ids)


class TestHistogram:
    def test_conservation(self, rng):
        recs = [MosRecord(f"x{i}", float(v), 0.1, 5) for i, v in enumerate(rng.uniform(1, 5, 360))]
        counts, edges = mos_histogram(recs, 8)
        assert counts.sum() == 360 and len(edges) == 9
        assert edges[0] == 1.0 and edges[-1] == 5.0

    def test_all_top(self):
        counts, _ = mos_histogram([MosRecord(f"x{i}", 5.0, 0.0, 5) for i in range(10)], 8)
        assert counts[-1] == 10 and counts[:-1].sum() == 0

    def test_bins(self):
        with pytest.raises(ValueError):
            mos_histogram([], 1)


class TestMatrix:
    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            matrix([[0, 3]])
        with pytest.raises(ValueError):
            matrix([[6, 3]])

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            SubjectScoreMatrix(np.ones((2, 2), int), ("a",), ("x", "y"))


class TestReadRawScores:
    def test_round_trip(self, tmp_path):
        p = tmp_path / "raw.csv"
        p.write_text("stimulus_id,a,b,c\nx1,5,5,4\nx2,1,2,3\n")
        m = read_raw_scores(p)
        assert m.subject_ids == ("a", "b", "c") and m.stimulus_ids == ("x1", "x2")
        assert m.scores.tolist() == [[5, 1], [5, 2], [4, 3]]

    def test_out_of_range_names_cell(self, tmp_path):
        p = tmp_path / "raw.csv"
        p.write_text("stimulus_id,a,b\nx1,5,4\nx2,6,3\n")
        with pytest.raises(RatingsFormatError, match=r"row 3, column a"):
            read_raw_scores(p)

    def test_non_integer(self, tmp_path):
        p = tmp_path / "raw.csv"
        p.write_text("stimulus_id,a,b\nx1,4.5,4\n")
        with pytest.raises(RatingsFormatError, match="column a"):
            read_raw_scores(p)

    def test_bad_header_and_ragged(self, tmp_path):
        p = tmp_path / "raw.csv"
        p.write_text("id,a\nx1,4\n")
        with pytest.raises(RatingsFormatError):
            read_raw_scores(p)
        p.write_text("stimulus_id,a,b\nx1,4\n")
        with pytest.raises(RatingsFormatError, match="row 2"):
            read_raw_scores(p)
