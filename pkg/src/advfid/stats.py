"""Logistic mapping of metric scores onto MOS and the four agreement measures."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.special import expit

from . import _core

MAX_ITER = 1000
REL_TOL = 1e-10
MAX_HALVINGS = 32


@dataclass(frozen=True)
class LogisticParams:
    beta: tuple[float, float, float, float, float]

    def __call__(self, x) -> np.ndarray:
        return logistic5(np.asarray(x, dtype=np.float64), np.asarray(self.beta))


@dataclass(frozen=True)
class FitDiagnostics:
    iterations: int
    residual_rmse: float
    converged: bool
    damped: bool
    affine_fallback: bool = False


def logistic5(x: np.ndarray, b: np.ndarray) -> np.ndarray:
    """b1 * (1/2 - 1/(1 + exp(b2 (x - b3)))) + b4 x + b5."""
    s = expit(-b[1] * (x - b[2]))
    return b[0] * (0.5 - s) + b[3] * x + b[4]


def _jacobian(x: np.ndarray, b: np.ndarray) -> np.ndarray:
    s = expit(-b[1] * (x - b[2]))
    ds = s * (1.0 - s)
    return np.column_stack([0.5 - s, b[0] * ds * (x - b[2]), -b[0] * ds * b[1], x, np.ones_like(x)])


def _sse(x, y, b) -> float:
    r = logistic5(x, b) - y
    v = float(r @ r)
    return v if math.isfinite(v) else math.inf


def _gauss_newton(x, y, b):
    sse = _sse(x, y, b)
    lam = 0.0
    damped = False
    converged = False
    it = 0
    while it < MAX_ITER:
        it += 1
        if sse == 0.0:
            converged = True
            break
        r = logistic5(x, b) - y
        jac = _jacobian(x, b)
        jtj = jac.T @ jac
        grad = jac.T @ r
        if lam > 0.0:
            jtj = jtj + lam * np.diag(np.diag(jtj) + 1e-12)
        try:
            step = np.linalg.solve(jtj, -grad)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(jac, -r, rcond=None)[0] if lam == 0.0 else np.linalg.lstsq(jtj, -grad, rcond=None)[0]
        t = 1.0
        accepted = None
        for halvings in range(MAX_HALVINGS + 1):
            cand = b + t * step
            c_sse = _sse(x, y, cand)
            if c_sse < sse:
                accepted = (cand, c_sse)
                break
            t *= 0.5
        if accepted is None:
            # no descent along the step even after halving: switch on damping
            damped = True
            lam = 1e-3 if lam == 0.0 else lam * 10.0
            if lam > 1e16:
                converged = True  # stationary to working precision
                break
            continue
        rel = (sse - accepted[1]) / sse
        b, sse = accepted
        if halvings > 3:
            # steps keep overshooting: damping gives better-scaled directions
            damped = True
            lam = 1e-3 if lam == 0.0 else lam * 10.0
        elif lam > 0.0 and halvings == 0:
            lam = lam / 10.0 if lam > 1e-12 else 0.0
        if rel < REL_TOL:
            converged = True
            break
    return b, sse, it, converged, damped


def _polish_linear(x, y, b, sse):
    """Exact least squares for (b1, b4, b5) with b2, b3 held fixed."""
    s = expit(-b[1] * (x - b[2]))
    basis = np.column_stack([0.5 - s, x, np.ones_like(x)])
    coef = np.linalg.lstsq(basis, y, rcond=None)[0]
    cand = np.array([coef[0], b[1], b[2], coef[1], coef[2]])
    c_sse = _sse(x, y, cand)
    return (cand, c_sse) if c_sse <= sse else (b, sse)


def fit_logistic5(x: Sequence[float], y: Sequence[float]) -> tuple[LogisticParams, FitDiagnostics]:
    """Least-squares fit of the five-parameter logistic by damped Gauss-Newton.

    Works on standardized ``x`` for conditioning and maps the parameters
    back. If the fit ends worse than the best affine map, the affine map is
    returned instead (flagged), so the family never underperforms a line.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("x and y must be 1-D and the same length")
    if x.size < 6:
        raise ValueError("need at least 6 samples to fit 5 parameters")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise ValueError("non-finite input")
    m, s = float(x.mean()), float(x.std())
    if s == 0.0:
        raise ValueError("degenerate x: all values equal")
    z = (x - m) / s
    r = float(np.corrcoef(z, y)[0, 1]) if y.std() > 0 else 0.0
    sign = -1.0 if r < 0 else 1.0
    b0 = np.array([float(y.max() - y.min()), sign * 4.0, 0.0, 0.0, float(y.mean())])
    # trial steps may overflow the exponent; such candidates just get rejected
    with np.errstate(over="ignore", invalid="ignore"):
        b, sse, it, conv, damped = _gauss_newton(z, y, b0)
        b, sse = _polish_linear(z, y, b, sse)

    aff = np.polyfit(z, y, 1)
    b_aff = np.array([0.0, sign * 4.0, 0.0, aff[0], aff[1]])
    fallback = False
    if _sse(z, y, b_aff) < sse:
        b, sse, fallback = b_aff, _sse(z, y, b_aff), True

    beta = (float(b[0]), float(b[1] / s), float(m + s * b[2]), float(b[3] / s), float(b[4] - b[3] * m / s))
    diag = FitDiagnostics(it, math.sqrt(sse / x.size), conv or fallback, damped, fallback)
    return LogisticParams(beta), diag


# agreement measures ----------------------------------------------------------

def plcc(x, y) -> float:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise ValueError("length mismatch")
    if x.size < 3:
        raise ValueError("need at least 3 samples")
    xc = x - x.mean()
    yc = y - y.mean()
    den = math.sqrt(float(xc @ xc) * float(yc @ yc))
    if den == 0.0:
        raise ValueError("constant input")
    return max(-1.0, min(1.0, float(xc @ yc) / den))


def srocc(x, y) -> float:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise ValueError("length mismatch")
    return plcc(_core.average_ranks(x), _core.average_ranks(y))


def rmse(pred, y) -> float:
    pred = np.asarray(pred, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if pred.shape != y.shape:
        raise ValueError("length mismatch")
    if pred.size == 0:
        raise ValueError("need at least one sample")
    d = pred - y
    return math.sqrt(float(d @ d) / d.size)


def outlier_ratio(pred, mos, ci95, fallback_threshold: float | None = None) -> tuple[float, bool]:
    """Fraction of predictions outside their stimulus CI.

    Stimuli without a finite CI use ``fallback_threshold``; the second return
    value says whether the fallback was needed.
    """
    pred = np.asarray(pred, dtype=np.float64)
    mos = np.asarray(mos, dtype=np.float64)
    ci = np.asarray(ci95, dtype=np.float64)
    if not (pred.shape == mos.shape == ci.shape):
        raise ValueError("length mismatch")
    if pred.size == 0:
        raise ValueError("need at least one sample")
    missing = ~np.isfinite(ci)
    used_fallback = bool(missing.any())
    if used_fallback:
        if fallback_threshold is None:
            raise ValueError("CI missing for some stimuli and no fallback threshold configured")
        ci = np.where(missing, fallback_threshold, ci)
    return float(np.mean(np.abs(pred - mos) > ci)), used_fallback


# per-metric evaluation -------------------------------------------------------

@dataclass
class PerformanceRow:
    metric: str
    n: int
    plcc: float = math.nan
    srocc: float = math.nan
    rmse: float = math.nan
    outlier_ratio: float = math.nan
    params: LogisticParams | None = None
    diagnostics: FitDiagnostics | None = None
    rmse_linear: float = math.nan
    or_linear: float = math.nan
    plcc_raw: float = math.nan
    flags: list[str] = field(default_factory=list)
    error: str | None = None

    @property
    def fitted(self) -> bool:
        return self.error is None


@dataclass
class PerformanceReport:
    rows: list[PerformanceRow]

    CSV_HEADER = ("metric", "plcc", "srocc", "rmse", "or", "beta1", "beta2", "beta3", "beta4", "beta5", "n")

    def csv_rows(self) -> list[list[str]]:
        out = []
        for r in self.rows:
            beta = r.params.beta if r.params else (math.nan,) * 5
            vals = [r.plcc, r.srocc, r.rmse, r.outlier_ratio, *beta]
            out.append([r.metric, *(_fmt(v) for v in vals), str(r.n)])
        return out

    def to_json(self) -> list[dict]:
        out = []
        for r in self.rows:
            d = r.diagnostics
            out.append({
                "metric": r.metric, "n": r.n, "plcc": _js(r.plcc), "srocc": _js(r.srocc),
                "rmse": _js(r.rmse), "or": _js(r.outlier_ratio),
                "beta": [_js(v) for v in r.params.beta] if r.params else None,
                "diagnostics": None if d is None else {
                    "iterations": d.iterations, "residual_rmse": _js(d.residual_rmse),
                    "converged": d.converged, "damped": d.damped, "affine_fallback": d.affine_fallback,
                    "plcc_raw": _js(r.plcc_raw), "rmse_linear": _js(r.rmse_linear), "or_linear": _js(r.or_linear),
                },
                "flags": list(r.flags), "error": r.error,
            })
        return out


def _fmt(v: float) -> str:
    return "nan" if v is None or not math.isfinite(v) else repr(float(v))


def _js(v):
    return None if v is None or not math.isfinite(v) else float(v)


def clamp_unbounded(values: np.ndarray) -> tuple[np.ndarray, bool]:
    """Replace +inf by (largest finite value + 1)."""
    values = np.asarray(values, dtype=np.float64)
    pos_inf = np.isposinf(values)
    if not pos_inf.any():
        return values, False
    finite = values[np.isfinite(values)]
    if finite.size == 0:
        raise ValueError("every score is unbounded; nothing to fit")
    out = values.copy()
    out[pos_inf] = finite.max() + 1.0
    return out, True


def evaluate_metric(metric: str, scores: dict[str, float], records, or_fallback: float | None = None
                    ) -> PerformanceRow:
    """Fit, then PLCC/RMSE/OR on mapped scores and SROCC on raw scores.

    ``scores`` maps stimulus id to value; ``records`` are MosRecords. The
    two must cover the same stimuli.
    """
    rec_ids = [r.stimulus_id for r in records]
    missing = sorted(set(rec_ids) - set(scores))
    extra = sorted(set(scores) - set(rec_ids))
    if missing or extra:
        raise ValueError(f"{metric}: score/MOS join mismatch (missing {missing[:5]}, extra {extra[:5]})")
    row = PerformanceRow(metric, len(records))
    try:
        x = np.array([scores[i] for i in rec_ids], dtype=np.float64)
        y = np.array([r.mos for r in records], dtype=np.float64)
        ci = np.array([r.ci95 for r in records], dtype=np.float64)
        if np.isnan(x).any():
            raise ValueError("missing scores (per-pair metric failures)")
        x, clamped = clamp_unbounded(x)
        if clamped:
            row.flags.append("unbounded-clamped")
        params, diag = fit_logistic5(x, y)
        pred = params(x)
        row.params, row.diagnostics = params, diag
        row.plcc = plcc(pred, y)
        row.srocc = srocc(x, y)
        row.rmse = rmse(pred, y)
        row.outlier_ratio, fb = outlier_ratio(pred, y, ci, or_fallback)
        if fb:
            row.flags.append("or-fallback-threshold")
        row.plcc_raw = plcc(x, y)
        lin = np.polyval(np.polyfit(x, y, 1), x)
        row.rmse_linear = rmse(lin, y)
        row.or_linear = outlier_ratio(lin, y, ci, or_fallback)[0]
        if not diag.converged:
            row.flags.append("fit-not-converged")
    except (ValueError, np.linalg.LinAlgError) as exc:
        row.error = str(exc)
    return row
