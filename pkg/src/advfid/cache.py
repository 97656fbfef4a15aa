"""On-disk score cache keyed by pair content, metric and constants digest."""

from __future__ import annotations

import hashlib
import json
import math
import os
import tempfile
from functools import lru_cache
from pathlib import Path

FORMAT = 1


@lru_cache(maxsize=4096)
def _file_digest(path: str, mtime_ns: int, size: int) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def file_digest(path: str | os.PathLike) -> str:
    st = os.stat(path)
    return _file_digest(str(path), st.st_mtime_ns, st.st_size)


def pair_digest(ref_path, test_path) -> str:
    return hashlib.sha256((file_digest(ref_path) + ":" + file_digest(test_path)).encode()).hexdigest()


class ScoreCache:
    def __init__(self, root: str | os.PathLike, constants_digest: str):
        self.root = Path(root)
        self.constants_digest = constants_digest

    def _path(self, pair_hash: str, metric: str) -> Path:
        key = hashlib.sha256(f"{FORMAT}|{pair_hash}|{metric}|{self.constants_digest}".encode()).hexdigest()
        return self.root / key[:2] / f"{key}.json"

    def get(self, pair_hash: str, metric: str) -> tuple[float, tuple[str, ...]] | None:
        p = self._path(pair_hash, metric)
        try:
            doc = json.loads(p.read_text(encoding="utf-8"))
            return float(doc["value"]), tuple(doc.get("flags", ()))
        except (OSError, ValueError, KeyError, TypeError):
            return None

    def put(self, pair_hash: str, metric: str, value: float, flags=()) -> None:
        """Write-then-rename so concurrent writers never expose partial files."""
        p = self._path(pair_hash, metric)
        p.parent.mkdir(parents=True, exist_ok=True)
        blob = json.dumps({"value": value if math.isfinite(value) else repr(value), "flags": list(flags)})
        fd, tmp = tempfile.mkstemp(dir=p.parent, prefix=".tmp-")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                fh.write(blob)
            os.replace(tmp, p)
        except BaseException:
            try:
                os.unlink(tmp)
            except OSError:
                pass
            raise
