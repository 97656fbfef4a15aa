"""Command-line entry point: ``advfid {score,bench,mos,descriptors,fit}``.

Exit status: 0 on success, 1 when an error report was written, 2 for
unusable input (bad manifest, config or ratings file).
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .cache import ScoreCache, pair_digest
from .config import ConfigError, RunConfig, load_config
from .descriptors import describe
from .imaging import ImageDecodeError, load_image
from .manifest import Manifest, ManifestError, load_manifest
from .metrics import score_all
from .stats import PerformanceReport, clamp_unbounded, evaluate_metric, fit_logistic5
from .subjective import MosRecord, RatingsFormatError, mos, mos_histogram, read_raw_scores, screen_outliers


def _fmt(v: float) -> str:
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return repr(float(v))


def _write_csv(path: Path, header, rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _write_errors(out_dir: Path, errors: list[str]) -> Path:
    p = out_dir / "errors.txt"
    p.write_text("\n".join(errors) + "\n", encoding="utf-8")
    return p


# scoring ---------------------------------------------------------------------

def _score_pair(job):
    """Worker: returns (stimulus_id, [(metric label, value, flags, error)], pair error)."""
    pair, metrics, const, tier2, cache_dir = job
    labels = [m.label for m in metrics]
    cache = ScoreCache(cache_dir, const.digest()) if cache_dir is not None else None
    try:
        key = pair_digest(pair.ref_path, pair.test_path) if cache else None
    except OSError as exc:
        return pair.stimulus_id, [], f"{pair.stimulus_id}: {exc}"
    results: dict[str, tuple] = {}
    todo = []
    for m in metrics:
        hit = cache.get(key, m.label) if cache else None
        if hit is not None:
            results[m.label] = (hit[0], hit[1], None)
        else:
            todo.append(m)
    if todo:
        try:
            ref, test = pair.load()
        except (OSError, ImageDecodeError, ValueError) as exc:
            return pair.stimulus_id, [], f"{pair.stimulus_id}: {exc}"
        for s in score_all(ref, test, todo, pair.stimulus_id, const, tier2):
            results[s.metric.label] = (s.value, s.flags, s.error)
            if cache and s.ok:
                cache.put(key, s.metric.label, s.value, s.flags)
    return pair.stimulus_id, [(lab, *results[lab]) for lab in labels], None


def run_scoring(manifest: Manifest, cfg: RunConfig):
    """Scores for every pair, sorted by stimulus id. Returns (table, errors)."""
    cache_dir = cfg.cache_dir if cfg.use_cache else None
    jobs = [(p, cfg.metrics, cfg.constants, cfg.tier2_enabled, cache_dir) for p in manifest.pairs]
    if cfg.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as ex:
            results = list(ex.map(_score_pair, jobs))
    else:
        results = [_score_pair(j) for j in jobs]
    table: dict[str, list] = {}
    errors: list[str] = []
    for sid, entries, err in sorted(results, key=lambda r: r[0]):
        if err:
            errors.append(err)
            continue
        table[sid] = entries
        for lab, _, _, e in entries:
            if e:
                errors.append(f"{sid}: {lab}: {e}")
    return table, errors


def _score_rows(table):
    return [[sid, lab, _fmt(val)] for sid in sorted(table) for lab, val, _, _ in table[sid]]


def _prepare(args) -> tuple[RunConfig, Manifest | None]:
    overrides = {}
    if getattr(args, "metrics", None):
        overrides["metrics"] = args.metrics
    if getattr(args, "jobs", None) is not None:
        overrides["jobs"] = str(args.jobs)
    if getattr(args, "no_cache", False):
        overrides["cache"] = "off"
    if getattr(args, "out_dir", None):
        overrides["out_dir"] = args.out_dir
    cfg = load_config(args.config, overrides)
    man = load_manifest(args.manifest) if getattr(args, "manifest", None) else None
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    (cfg.out_dir / "resolved_config.txt").write_text(cfg.snapshot(), encoding="utf-8")
    return cfg, man


def cmd_score(args) -> int:
    cfg, man = _prepare(args)
    table, errors = run_scoring(man, cfg)
    out = cfg.out_dir / "scores.csv"
    _write_csv(out, ("stimulus_id", "metric", "value"), _score_rows(table))
    print(f"wrote {out} ({sum(len(v) for v in table.values())} rows)")
    if errors:
        print(f"{len(errors)} error(s); see {_write_errors(cfg.out_dir, errors)}", file=sys.stderr)
        return 1
    return 0


# subjective ------------------------------------------------------------------

def _mos_outputs(raw_path: str, out_dir: Path, bins: int) -> list[MosRecord]:
    matrix = read_raw_scores(raw_path)
    kept, rejected = screen_outliers(matrix)
    records = sorted(mos(kept), key=lambda r: r.stimulus_id)
    _write_csv(out_dir / "mos.csv", ("stimulus_id", "mos", "ci95", "n_subjects"),
               [[r.stimulus_id, _fmt(r.mos), _fmt(r.ci95), r.n_subjects] for r in records])
    counts, edges = mos_histogram(records, bins)
    _write_csv(out_dir / "mos_histogram.csv", ("bin_low", "bin_high", "count"),
               [[_fmt(edges[i]), _fmt(edges[i + 1]), int(c)] for i, c in enumerate(counts)])
    summary = {
        "subjects": matrix.n_subjects, "stimuli": matrix.n_stimuli,
        "rejected_subjects": rejected, "retained_subjects": kept.n_subjects,
    }
    (out_dir / "screening.json").write_text(json.dumps(summary, indent=2) + "\n", encoding="utf-8")
    print(f"screening: {len(rejected)} of {matrix.n_subjects} subjects rejected"
          + (f" ({', '.join(rejected)})" if rejected else ""))
    return records


def cmd_mos(args) -> int:
    cfg, _ = _prepare(args)
    _mos_outputs(args.raw_scores, cfg.out_dir, cfg.bins)
    print(f"wrote {cfg.out_dir / 'mos.csv'} and {cfg.out_dir / 'mos_histogram.csv'}")
    return 0


def cmd_bench(args) -> int:
    cfg, man = _prepare(args)
    if args.raw_scores:
        records = _mos_outputs(args.raw_scores, cfg.out_dir, cfg.bins)
    elif man.has_mos:
        records = [MosRecord(p.stimulus_id, p.mos, p.ci95 if p.ci95 is not None else math.nan, 0)
                   for p in man.pairs]
        counts, edges = mos_histogram(records, cfg.bins)
        _write_csv(cfg.out_dir / "mos_histogram.csv", ("bin_low", "bin_high", "count"),
                   [[_fmt(edges[i]), _fmt(edges[i + 1]), int(c)] for i, c in enumerate(counts)])
    else:
        print("error: bench needs --raw-scores or a manifest with a filled mos column", file=sys.stderr)
        return 2
    by_id = {r.stimulus_id: r for r in records}
    missing = sorted(p.stimulus_id for p in man.pairs if p.stimulus_id not in by_id)
    if missing:
        print(f"error: no subjective scores for {len(missing)} stimuli, e.g. {missing[:5]}", file=sys.stderr)
        return 2
    records = [by_id[p.stimulus_id] for p in sorted(man.pairs, key=lambda p: p.stimulus_id)]
    if cfg.or_mode == "fixed":
        records = [MosRecord(r.stimulus_id, r.mos, math.nan, r.n_subjects) for r in records]

    table, errors = run_scoring(man, cfg)
    _write_csv(cfg.out_dir / "scores.csv", ("stimulus_id", "metric", "value"), _score_rows(table))
    if len(table) != len(records):
        print("error: some pairs could not be scored; no report written", file=sys.stderr)
        print(f"see {_write_errors(cfg.out_dir, errors)}", file=sys.stderr)
        return 1

    rows = []
    scatter_dir = cfg.out_dir / "scatter"
    for m in cfg.metrics:
        scores = {}
        for sid, entries in table.items():
            for lab, val, _, _ in entries:
                if lab == m.label:
                    scores[sid] = val
        row = evaluate_metric(m.label, scores, records, cfg.or_threshold)
        rows.append(row)
        if row.error:
            errors.append(f"{m.label}: evaluation failed: {row.error}")
            continue
        _write_csv(scatter_dir / f"{m.label}.csv", ("stimulus_id", "raw_score", "mapped_score", "mos", "ci95"),
                   [[r.stimulus_id, _fmt(scores[r.stimulus_id]), _fmt(float(q)), _fmt(r.mos), _fmt(r.ci95)]
                    for r, q in zip(records, _mapped(row, scores, records))])
    report = PerformanceReport(rows)
    _write_csv(cfg.out_dir / "report.csv", PerformanceReport.CSV_HEADER, report.csv_rows())
    doc = {"version": __version__, "constants_digest": cfg.constants.digest(),
           "constants": cfg.constants.to_dict(), "or_mode": cfg.or_mode, "rows": report.to_json()}
    (cfg.out_dir / "report.json").write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    _print_report(report)
    if errors:
        print(f"{len(errors)} error(s); see {_write_errors(cfg.out_dir, errors)}", file=sys.stderr)
        return 1
    return 0


def _mapped(row, scores, records):
    raw = np.array([scores[r.stimulus_id] for r in records], dtype=np.float64)
    clamped, _ = clamp_unbounded(raw)
    return row.params(clamped)


def _print_report(report: PerformanceReport) -> None:
    print(f"{'metric':<8} {'PLCC':>7} {'SROCC':>7} {'RMSE':>7} {'OR':>7}")
    for r in report.rows:
        if r.error:
            print(f"{r.metric:<8} unfit: {r.error}")
        else:
            print(f"{r.metric:<8} {r.plcc:7.3f} {r.srocc:7.3f} {r.rmse:7.3f} {r.outlier_ratio:7.3f}")


# descriptors -----------------------------------------------------------------

def cmd_descriptors(args) -> int:
    cfg, man = _prepare(args)
    seen: dict[Path, str] = {}
    for p in sorted(man.pairs, key=lambda p: p.stimulus_id):
        if p.ref_path not in seen:
            seen[p.ref_path] = p.ref_path.stem
    stems = list(seen.values())
    rows, errors = [], []
    for path, stem in seen.items():
        name = stem if stems.count(stem) == 1 else str(path.relative_to(man.root) if path.is_relative_to(man.root) else path)
        try:
            d = describe(name, load_image(path))
        except (OSError, ImageDecodeError, ValueError) as exc:
            errors.append(f"{path}: {exc}")
            continue
        rows.append([d.stimulus_id, _fmt(d.si), "n/a" if d.cf is None else _fmt(d.cf)])
    rows.sort(key=lambda r: r[0])
    out = cfg.out_dir / "descriptors.csv"
    _write_csv(out, ("stimulus_id", "si", "cf"), rows)
    print(f"wrote {out} ({len(rows)} contents)")
    if errors:
        print(f"{len(errors)} error(s); see {_write_errors(cfg.out_dir, errors)}", file=sys.stderr)
        return 1
    return 0


# fit -------------------------------------------------------------------------

def cmd_fit(args) -> int:
    xs, ys = [], []
    with open(args.data, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        for n, row in enumerate(reader, start=1):
            if not row or row[0].strip().startswith("#"):
                continue
            try:
                xs.append(float(row[0]))
                ys.append(float(row[1]))
            except (ValueError, IndexError):
                if n == 1:
                    continue  # header
                print(f"error: {args.data}: line {n} is not an x,y pair", file=sys.stderr)
                return 2
    params, diag = fit_logistic5(xs, ys)
    doc = {"beta": list(params.beta), "iterations": diag.iterations, "residual_rmse": diag.residual_rmse,
           "converged": diag.converged, "damped": diag.damped, "affine_fallback": diag.affine_fallback}
    text = json.dumps(doc, indent=2) + "\n"
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "fit.json").write_text(text, encoding="utf-8")
    sys.stdout.write(text)
    return 0


# argument parsing ------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="advfid", description="Image fidelity scoring and benchmarking.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, manifest=True, raw=False, raw_required=False):
        if manifest:
            p.add_argument("--manifest", required=True, help="manifest CSV or JSON")
        if raw:
            p.add_argument("--raw-scores", required=raw_required, help="raw ratings CSV")
        p.add_argument("--config", help="key = value config file")
        p.add_argument("--out-dir", help="output directory")
        p.add_argument("--metrics", help="tier1, tier2, all, or comma-separated names")
        p.add_argument("--jobs", type=int, help="worker processes")
        p.add_argument("--no-cache", action="store_true", help="ignore and do not write the score cache")

    common(sub.add_parser("score", help="score every pair in a manifest"))
    common(sub.add_parser("bench", help="MOS, scoring and per-metric agreement report"), raw=True)
    common(sub.add_parser("mos", help="screen raw ratings and compute MOS"), manifest=False, raw=True,
           raw_required=True)
    common(sub.add_parser("descriptors", help="SI and CF per reference content"))
    fit = sub.add_parser("fit", help="fit the five-parameter logistic to x,y data")
    fit.add_argument("data", help="CSV with x,y columns")
    fit.add_argument("--out-dir", help="also write fit.json here")
    return ap


_COMMANDS = {"score": cmd_score, "bench": cmd_bench, "mos": cmd_mos, "descriptors": cmd_descriptors, "fit": cmd_fit}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ManifestError, ConfigError, RatingsFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
