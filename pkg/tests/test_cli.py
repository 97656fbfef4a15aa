import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from advfid.cli import main
from advfid.metrics import TIER1


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_mos(dataset, tmp_path):
    _, raw, ids = dataset
    out = tmp_path / "out"
    assert main(["mos", "--raw-scores", str(raw), "--out-dir", str(out)]) == 0
    rows = read_csv(out / "mos.csv")
    assert rows[0][:3] == ["stimulus_id", "mos", "ci95"]
    assert [r[0] for r in rows[1:]] == ids
    hist = read_csv(out / "mos_histogram.csv")
    assert sum(int(r[2]) for r in hist[1:]) == 30
    screening = json.loads((out / "screening.json").read_text())
    assert screening["rejected_subjects"] == [] and screening["retained_subjects"] == 12


def test_score_cache_and_jobs(dataset, tmp_path):
    man, _, ids = dataset
    a, b, c = tmp_path / "a", tmp_path / "b", tmp_path / "c"
    assert main(["score", "--manifest", str(man), "--out-dir", str(a)]) == 0
    rows = read_csv(a / "scores.csv")
    assert len(rows) == 1 + 30 * len(TIER1)
    # sorted by stimulus id, then report order
    assert [r[0] for r in rows[1::len(TIER1)]] == ids
    assert [r[1] for r in rows[1:1 + len(TIER1)]] == [m.label for m in TIER1]
    assert any((tmp_path / "cache").rglob("*.json"))
    assert main(["score", "--manifest", str(man), "--out-dir", str(b)]) == 0
    assert main(["score", "--manifest", str(man), "--out-dir", str(c), "--no-cache", "--jobs", "2"]) == 0
    first = (a / "scores.csv").read_bytes()
    assert (b / "scores.csv").read_bytes() == first
    assert (c / "scores.csv").read_bytes() == first
    assert (a / "resolved_config.txt").is_file()


def test_score_disabled_tier2_reports_error(dataset, tmp_path):
    man, _, _ = dataset
    out = tmp_path / "o"
    assert main(["score", "--manifest", str(man), "--out-dir", str(out), "--metrics", "PSNR,FSIM"]) == 1
    assert "not enabled" in (out / "errors.txt").read_text()
    rows = read_csv(out / "scores.csv")
    assert {r[1] for r in rows[1:]} == {"PSNR", "FSIM"}
    assert all(r[2] == "nan" for r in rows[1:] if r[1] == "FSIM")


def test_score_tier2_enabled_by_config(dataset, tmp_path):
    man, _, _ = dataset
    cfg = tmp_path / "run.cfg"
    cfg.write_text("metrics = FSIM,MAD\ntier2 = on\n")
    out = tmp_path / "o"
    assert main(["score", "--manifest", str(man), "--config", str(cfg), "--out-dir", str(out)]) == 0
    assert len(read_csv(out / "scores.csv")) == 1 + 60


def test_bench(dataset, tmp_path, capsys):
    man, raw, _ = dataset
    out = tmp_path / "bench"
    assert main(["bench", "--manifest", str(man), "--raw-scores", str(raw), "--out-dir", str(out)]) == 0
    report = read_csv(out / "report.csv")
    assert report[0] == ["metric", "plcc", "srocc", "rmse", "or", "beta1", "beta2", "beta3", "beta4", "beta5", "n"]
    assert [r[0] for r in report[1:]] == [m.label for m in TIER1]
    for r in report[1:]:
        assert -1 <= float(r[1]) <= 1 and -1 <= float(r[2]) <= 1 and r[-1] == "30"
    doc = json.loads((out / "report.json").read_text())
    assert doc["constants_digest"] in (out / "resolved_config.txt").read_text() and len(doc["rows"]) == len(TIER1)
    assert len(read_csv(out / "scatter" / "SSIM.csv")) == 31
    printed = capsys.readouterr().out
    assert "PLCC" in printed and "SSIM" in printed


def test_bench_needs_mos(dataset, tmp_path):
    man, _, _ = dataset
    assert main(["bench", "--manifest", str(man), "--out-dir", str(tmp_path / "o")]) == 2


def test_descriptors(dataset, tmp_path):
    man, _, _ = dataset
    out = tmp_path / "d"
    assert main(["descriptors", "--manifest", str(man), "--out-dir", str(out)]) == 0
    rows = read_csv(out / "descriptors.csv")
    assert [r[0] for r in rows[1:]] == ["edges", "gradient", "texture"]
    assert all(float(r[1]) > 0 and float(r[2]) > 0 for r in rows[1:])


def test_fit(tmp_path, capsys):
    x = np.linspace(-5, 5, 50)
    y = 2 * (0.5 - 1 / (1 + np.exp(x))) + 0.5 * x + 3
    data = tmp_path / "xy.csv"
    data.write_text("x,y\n" + "".join(f"{float(a)!r},{float(b)!r}\n" for a, b in zip(x, y)))
    assert main(["fit", str(data), "--out-dir", str(tmp_path / "f")]) == 0
    doc = json.loads((tmp_path / "f" / "fit.json").read_text())
    assert doc["residual_rmse"] < 1e-6 and len(doc["beta"]) == 5
    assert json.loads(capsys.readouterr().out) == doc


@pytest.mark.parametrize("content", ["stimulus_id,ref_path\n", ""])
def test_bad_manifest_exit_2(tmp_path, content):
    (tmp_path / "m.csv").write_text(content)
    assert main(["score", "--manifest", str(tmp_path / "m.csv"), "--out-dir", str(tmp_path / "o")]) == 2


def test_bad_ratings_exit_2(tmp_path, capsys):
    (tmp_path / "raw.csv").write_text("stimulus_id,a,b\nx,6,3\n")
    assert main(["mos", "--raw-scores", str(tmp_path / "raw.csv"), "--out-dir", str(tmp_path / "o")]) == 2
    assert "column a" in capsys.readouterr().err


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "advfid.cli", "--version"], capture_output=True, text=True)
    assert r.returncode == 0 and "advfid" in r.stdout
