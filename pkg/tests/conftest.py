from __future__ import annotations

import numpy as np
import pytest
from scipy.ndimage import gaussian_filter

from advfid.imaging import Image

ACCEPTANCE: dict[int, tuple[str, str]] = {}


def _smooth_texture(rng, size):
    base = gaussian_filter(rng.uniform(0, 255, (size, size, 3)), (3, 3, 0))
    return np.clip((base - base.mean()) * 4 + 128, 0, 255)


def _edges(rng, size):
    yy, xx = np.mgrid[0:size, 0:size]
    img = np.where((xx // 24 + yy // 24) % 2 == 0, 60.0, 190.0)
    img = img + 30 * np.sin(xx / 7.0) * np.cos(yy / 11.0)
    rgb = np.stack([img, 0.8 * img + 20, 255 - 0.7 * img], axis=2)
    return np.clip(gaussian_filter(rgb, (1, 1, 0)), 0, 255)


def _gradient_scene(rng, size):
    yy, xx = np.mgrid[0:size, 0:size]
    g = 40 + 150 * xx / size + 30 * yy / size
    tex = gaussian_filter(rng.normal(0, 25, (size, size)), 2) * 2
    return np.clip(np.stack([g + tex, g * 0.9 + tex, 0.6 * g + 60 + tex], axis=2), 0, 255)


CONTENT_BUILDERS = {"texture": _smooth_texture, "edges": _edges, "gradient": _gradient_scene}


def make_content(kind: str, size: int = 96, seed: int = 0) -> Image:
    rng = np.random.default_rng(seed)
    return Image(np.round(CONTENT_BUILDERS[kind](rng, size)).astype(np.uint8))


def add_noise(img: Image, sigma: float, seed: int = 1) -> Image:
    z = np.random.default_rng(seed).standard_normal(img.pixels.shape)
    return Image(np.clip(np.round(img.pixels + sigma * z), 0, 255).astype(np.uint8))


@pytest.fixture(params=sorted(CONTENT_BUILDERS))
def content(request) -> Image:
    return make_content(request.param)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def record_acceptance(number: int, status: str, text: str) -> None:
    ACCEPTANCE[number] = (status, text)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        status, text = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {status} - {text}")


def make_dataset(root, size: int = 64, subjects: int = 12, seed: int = 7):
    """Synthetic study: 3 contents x 2 attacks x 5 strengths, plus ratings that fall with noise.

    Returns (manifest path, raw ratings path, list of stimulus ids).
    """
    from PIL import Image as PILImage

    rng = np.random.default_rng(seed)
    root.mkdir(parents=True, exist_ok=True)
    (root / "ref").mkdir(exist_ok=True)
    (root / "adv").mkdir(exist_ok=True)
    lines = ["stimulus_id,ref_path,test_path,attack,param_name,param_value,mos,ci95"]
    raw = ["stimulus_id," + ",".join(f"subj{k:02d}" for k in range(subjects))]
    ids = []
    for c, kind in enumerate(sorted(CONTENT_BUILDERS)):
        ref = make_content(kind, size=size, seed=c)
        PILImage.fromarray(ref.pixels).save(root / "ref" / f"{kind}.png")
        for attack, pname, values in (("FGSM", "epsilon", ["0.002", "0.005", "0.01", "0.02", "0.04"]),
                                      ("C&W", "confidence;learning_rate", ["0;0.01", "5;0.01", "10;0.01",
                                                                           "20;0.01", "40;0.01"])):
            for k, val in enumerate(values):
                sid = f"{kind}_{'fgsm' if attack == 'FGSM' else 'cw'}_{k}"
                sigma = [2, 5, 10, 20, 40][k] * (1.0 if attack == "FGSM" else 0.7)
                test = add_noise(ref, sigma, seed=100 + 10 * c + k + (50 if attack == "C&W" else 0))
                PILImage.fromarray(test.pixels).save(root / "adv" / f"{sid}.png")
                lines.append(f"{sid},ref/{kind}.png,adv/{sid}.png,{attack},{pname},{val},,")
                center = 5.0 - 3.6 * (sigma / 40.0) ** 0.7
                ratings = np.clip(np.round(center + rng.normal(0, 0.6, subjects)), 1, 5).astype(int)
                raw.append(sid + "," + ",".join(str(v) for v in ratings))
                ids.append(sid)
    (root / "manifest.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    (root / "raw.csv").write_text("\n".join(raw) + "\n", encoding="utf-8")
    return root / "manifest.csv", root / "raw.csv", sorted(ids)


@pytest.fixture
def dataset(tmp_path, monkeypatch):
    monkeypatch.setenv("ADVFID_CACHE_DIR", str(tmp_path / "cache"))
    return make_dataset(tmp_path / "ds")
