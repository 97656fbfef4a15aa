"""Stimulus manifest: reference/adversarial image pairs plus attack metadata.

CSV columns: ``stimulus_id,ref_path,test_path,attack,param_name,param_value,mos,ci95``.
The two-parameter C&W setting is written ``v1;v2``. Relative paths resolve
against the manifest's directory, or against ``root`` in the JSON form::

    {"schema_version": 1, "root": "...", "pairs": [{"stimulus_id": ..., ...}]}
"""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass
from pathlib import Path

from .imaging import load_image

SCHEMA_VERSION = 1
COLUMNS = ("stimulus_id", "ref_path", "test_path", "attack", "param_name", "param_value", "mos", "ci95")
REQUIRED = COLUMNS[:6]

# attack -> (parameter name, number of values)
ATTACK_PARAMS = {
    "FGSM": ("epsilon", 1),
    "BIM": ("epsilon", 1),
    "Deepfool": ("overshoot", 1),
    "C&W": ("confidence;learning_rate", 2),
    "PGD": ("epsilon", 1),
    "MIM": ("epsilon", 1),
}
_ATTACK_ALIASES = {a.lower().replace("&", "").replace("-", ""): a for a in ATTACK_PARAMS}
_ATTACK_ALIASES.update({"cw": "C&W", "carliniwagner": "C&W"})
_PARAM_ALIASES = {"eps": "epsilon", "ε": "epsilon", "(confidence,learning_rate)": "confidence;learning_rate",
                  "confidence,learning_rate": "confidence;learning_rate"}


class ManifestError(ValueError):
    def __init__(self, problems: list[str]):
        self.problems = list(problems)
        super().__init__("manifest invalid:\n  " + "\n  ".join(self.problems))


@dataclass(frozen=True)
class StimulusPair:
    stimulus_id: str
    ref_path: Path
    test_path: Path
    attack: str
    param_name: str
    param_value: tuple[float, ...]
    mos: float | None = None
    ci95: float | None = None

    @property
    def content_id(self) -> str:
        """Reference content identity (its resolved path)."""
        return str(self.ref_path)

    def load(self):
        ref = load_image(self.ref_path)
        test = load_image(self.test_path)
        if ref.pixels.shape != test.pixels.shape:
            raise ValueError(f"{self.stimulus_id}: reference {ref.pixels.shape} and test "
                             f"{test.pixels.shape} differ in shape")
        return ref, test


@dataclass(frozen=True)
class Manifest:
    pairs: tuple[StimulusPair, ...]
    root: Path
    schema_version: int = SCHEMA_VERSION

    def __len__(self) -> int:
        return len(self.pairs)

    @property
    def has_mos(self) -> bool:
        return bool(self.pairs) and all(p.mos is not None for p in self.pairs)


def normalize_attack(name: str) -> str | None:
    return _ATTACK_ALIASES.get(name.strip().lower().replace("&", "").replace("-", "").replace(" ", ""))


def _opt_float(raw, field: str, where: str, problems: list[str]) -> float | None:
    if raw is None or (isinstance(raw, str) and not raw.strip()):
        return None
    try:
        v = float(raw)
    except (TypeError, ValueError):
        problems.append(f"{where}: {field} {raw!r} is not a number")
        return None
    if not math.isfinite(v):
        problems.append(f"{where}: {field} must be finite")
        return None
    return v


def _build_pair(rec: dict, root: Path, where: str, problems: list[str]) -> StimulusPair | None:
    missing = [c for c in REQUIRED if not str(rec.get(c, "") or "").strip()]
    if missing:
        problems.append(f"{where}: missing {', '.join(missing)}")
        return None
    sid = str(rec["stimulus_id"]).strip()
    attack = normalize_attack(str(rec["attack"]))
    if attack is None:
        problems.append(f"{where}: unknown attack {rec['attack']!r} (expected one of {', '.join(ATTACK_PARAMS)})")
        return None
    pname = str(rec["param_name"]).strip()
    pname = _PARAM_ALIASES.get(pname.lower().replace(" ", ""), pname)
    want_name, arity = ATTACK_PARAMS[attack]
    if pname != want_name:
        problems.append(f"{where}: attack {attack} takes parameter {want_name!r}, got {pname!r}")
    raw_val = rec["param_value"]
    parts = raw_val if isinstance(raw_val, (list, tuple)) else str(raw_val).strip("() ").replace(",", ";").split(";")
    try:
        values = tuple(float(v) for v in parts)
    except (TypeError, ValueError):
        problems.append(f"{where}: param_value {raw_val!r} is not numeric")
        return None
    if len(values) != arity:
        problems.append(f"{where}: attack {attack} needs {arity} parameter value(s), got {len(values)}")
    mos = _opt_float(rec.get("mos"), "mos", where, problems)
    ci = _opt_float(rec.get("ci95"), "ci95", where, problems)
    if mos is not None and not 1.0 <= mos <= 5.0:
        problems.append(f"{where}: mos {mos} outside [1, 5]")
    if ci is not None and ci < 0:
        problems.append(f"{where}: ci95 must be non-negative")

    def resolve(p):
        p = Path(str(p).strip())
        return p if p.is_absolute() else root / p

    return StimulusPair(sid, resolve(rec["ref_path"]), resolve(rec["test_path"]), attack, pname, values, mos, ci)


def load_manifest(path: str | os.PathLike, check_images: bool = False) -> Manifest:
    """Parse and validate; every problem is reported, not only the first.

    File existence is always checked; ``check_images`` also decodes every
    image and compares pair shapes.
    """
    path = Path(path)
    if not path.is_file():
        raise ManifestError([f"{path}: no such file"])
    text = path.read_text(encoding="utf-8")
    if not text.strip():
        raise ManifestError([f"{path}: empty manifest"])
    problems: list[str] = []
    root = path.parent.resolve()
    version = SCHEMA_VERSION
    if path.suffix.lower() == ".json":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ManifestError([f"{path}: invalid JSON ({exc})"]) from None
        if not isinstance(doc, dict) or not isinstance(doc.get("pairs"), list):
            raise ManifestError([f"{path}: JSON manifest needs a 'pairs' list"])
        version = int(doc.get("schema_version", SCHEMA_VERSION))
        if version != SCHEMA_VERSION:
            raise ManifestError([f"{path}: unsupported schema_version {version}"])
        if doc.get("root"):
            r = Path(doc["root"])
            root = r if r.is_absolute() else (path.parent / r).resolve()
        records = [(f"pair {i + 1}", rec) for i, rec in enumerate(doc["pairs"])]
    else:
        reader = csv.DictReader(text.splitlines())
        header = [h.strip() for h in (reader.fieldnames or [])]
        absent = [c for c in REQUIRED if c not in header]
        if absent:
            raise ManifestError([f"{path}: header lacks column(s) {', '.join(absent)}"])
        records = [(f"line {i + 2}", {k.strip(): v for k, v in row.items() if k})
                   for i, row in enumerate(reader)]
    if not records:
        raise ManifestError([f"{path}: manifest has no pairs"])

    pairs = []
    seen: dict[str, str] = {}
    for where, rec in records:
        if not isinstance(rec, dict):
            problems.append(f"{where}: not an object")
            continue
        pair = _build_pair(rec, root, where, problems)
        if pair is None:
            continue
        if pair.stimulus_id in seen:
            problems.append(f"{where}: duplicate stimulus_id {pair.stimulus_id!r} (first at {seen[pair.stimulus_id]})")
            continue
        seen[pair.stimulus_id] = where
        pairs.append(pair)

    for p in pairs:
        for label, f in (("ref_path", p.ref_path), ("test_path", p.test_path)):
            if not f.is_file():
                problems.append(f"{p.stimulus_id}: {label} {f} not found")
    if check_images and not problems:
        for p in pairs:
            try:
                p.load()
            except Exception as exc:  # noqa: BLE001 - collected
                problems.append(f"{p.stimulus_id}: {exc}")
    if problems:
        raise ManifestError(problems)
    return Manifest(tuple(pairs), root, version)
