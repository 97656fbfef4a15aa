"""Raw ratings to screened MOS with t-based confidence intervals."""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass

import numpy as np
from scipy import stats

GRADES = (1, 2, 3, 4, 5)


class RatingsFormatError(ValueError):
    pass


@dataclass(frozen=True)
class SubjectScoreMatrix:
    """Ratings indexed [subject, stimulus] on the five-grade scale."""

    scores: np.ndarray
    subject_ids: tuple[str, ...]
    stimulus_ids: tuple[str, ...]

    def __post_init__(self):
        s = np.asarray(self.scores)
        if s.ndim != 2 or s.shape != (len(self.subject_ids), len(self.stimulus_ids)):
            raise ValueError("score matrix shape does not match the id lists")
        if s.size and (not np.issubdtype(s.dtype, np.integer) or s.min() < 1 or s.max() > 5):
            raise ValueError("ratings must be integers in 1..5")
        s = s.astype(np.int64)
        s.setflags(write=False)
        object.__setattr__(self, "scores", s)
        if len(set(self.stimulus_ids)) != len(self.stimulus_ids):
            raise ValueError("duplicate stimulus ids")
        if len(set(self.subject_ids)) != len(self.subject_ids):
            raise ValueError("duplicate subject ids")

    @property
    def n_subjects(self) -> int:
        return len(self.subject_ids)

    @property
    def n_stimuli(self) -> int:
        return len(self.stimulus_ids)

    def drop_subjects(self, ids) -> "SubjectScoreMatrix":
        drop = set(ids)
        keep = [i for i, s in enumerate(self.subject_ids) if s not in drop]
        return SubjectScoreMatrix(self.scores[keep], tuple(self.subject_ids[i] for i in keep), self.stimulus_ids)


@dataclass(frozen=True)
class MosRecord:
    stimulus_id: str
    mos: float
    ci95: float
    n_subjects: int


def t_quantile(n: int, p: float = 0.975) -> float:
    """Student-t quantile with ``n - 1`` degrees of freedom."""
    if n < 2:
        raise ValueError("need at least two ratings for a t interval")
    return float(stats.t.ppf(p, n - 1))


def screen_outliers(m: SubjectScoreMatrix) -> tuple[SubjectScoreMatrix, list[str]]:
    """Subject rejection by the two-condition rule on per-stimulus deviations."""
    if m.n_subjects < 3:
        raise ValueError("screening needs at least 3 subjects")
    u = m.scores.astype(np.float64)
    mean = u.mean(axis=0)
    dev = u - mean
    m2 = (dev**2).mean(axis=0)
    m4 = (dev**4).mean(axis=0)
    with np.errstate(divide="ignore", invalid="ignore"):
        beta2 = np.where(m2 > 0, m4 / (m2 * m2), 0.0)
    sd = u.std(axis=0, ddof=1)
    normal = (beta2 >= 2.0) & (beta2 <= 4.0)
    width = np.where(normal, 2.0, math.sqrt(20.0)) * sd
    # zero-spread stimuli cannot flag anyone
    live = sd > 0
    p = ((u >= mean + width) & live).sum(axis=1)
    q = ((u <= mean - width) & live).sum(axis=1)
    j = m.n_stimuli
    rejected = []
    for sid, pi, qi in zip(m.subject_ids, p, q):
        tot = pi + qi
        if tot and tot / j > 0.05 and abs(pi - qi) / tot < 0.3:
            rejected.append(sid)
    return (m.drop_subjects(rejected) if rejected else m), rejected


def mos(m: SubjectScoreMatrix) -> list[MosRecord]:
    """Per-stimulus mean and 95% CI half-width (``inf`` with a single subject)."""
    u = m.scores.astype(np.float64)
    n = m.n_subjects
    if n == 0:
        raise ValueError("no subjects")
    means = u.mean(axis=0)
    if n > 1:
        half = t_quantile(n) * u.std(axis=0, ddof=1) / math.sqrt(n)
    else:
        half = np.full(m.n_stimuli, math.inf)
    return [MosRecord(sid, float(mu), float(h), n) for sid, mu, h in zip(m.stimulus_ids, means, half)]


def mos_histogram(records, bins: int = 8) -> tuple[np.ndarray, np.ndarray]:
    """(counts, edges) over equal-width bins on [1, 5]; the last bin is right-closed."""
    if bins < 2:
        raise ValueError("need at least 2 bins")
    values = np.array([r.mos for r in records], dtype=np.float64)
    counts, edges = np.histogram(values, bins=bins, range=(1.0, 5.0))
    return counts, edges


def read_raw_scores(path: str | os.PathLike) -> SubjectScoreMatrix:
    """Parse ``stimulus_id,subject_1,...`` CSV; every cell must be an integer grade."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise RatingsFormatError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    if len(header) < 2 or header[0] != "stimulus_id":
        raise RatingsFormatError(f"{path}: header must be stimulus_id,subject_1,...")
    subjects = tuple(header[1:])
    stim, data, problems = [], [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            problems.append(f"row {lineno}: expected {len(header)} cells, got {len(row)}")
            continue
        vals = []
        for col, cell in zip(header[1:], row[1:]):
            cell = cell.strip()
            try:
                v = int(cell)
            except ValueError:
                problems.append(f"row {lineno}, column {col}: {cell!r} is not an integer rating")
                continue
            if v not in GRADES:
                problems.append(f"row {lineno}, column {col}: rating {v} outside 1..5")
                continue
            vals.append(v)
        stim.append(row[0].strip())
        data.append(vals)
    if problems:
        raise RatingsFormatError(f"{path}: " + "; ".join(problems))
    if not data:
        raise RatingsFormatError(f"{path}: no rating rows")
    return SubjectScoreMatrix(np.array(data, dtype=np.int64).T, subjects, tuple(stim))
