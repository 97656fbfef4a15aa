"""Run configuration from a ``key = value`` file plus command-line overrides.

Recognized keys::

    metrics    = tier1 | tier2 | all | comma-separated metric names
    tier2      = off | on | comma-separated tier-2 names   (extended metrics are opt-in)
    jobs       = worker processes (>= 1)
    cache      = on | off
    cache_dir  = cache root (default: $ADVFID_CACHE_DIR, else the user cache dir)
    out_dir    = output directory
    or_mode    = ci95 | fixed
    or_threshold = fallback/fixed outlier threshold in MOS units
    bins       = MOS histogram bins
    const.<name> = override for any entry of the constants table
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path

from .metrics import TIER1, TIER2, MetricId, order_metrics
from .metrics.constants import DEFAULT_CONSTANTS, Constants

CACHE_ENV = "ADVFID_CACHE_DIR"
_TRUE = ("1", "true", "yes", "on")
_FALSE = ("0", "false", "no", "off", "")


class ConfigError(ValueError):
    pass


def default_cache_dir() -> Path:
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    base = os.environ.get("XDG_CACHE_HOME") or os.path.join(os.path.expanduser("~"), ".cache")
    return Path(base) / "advfid"


@dataclass
class RunConfig:
    metrics: list[MetricId] = field(default_factory=lambda: list(TIER1))
    tier2_enabled: frozenset[MetricId] = frozenset()
    jobs: int = 1
    use_cache: bool = True
    cache_dir: Path = field(default_factory=default_cache_dir)
    out_dir: Path = Path("advfid-out")
    or_mode: str = "ci95"
    or_threshold: float = 0.5
    bins: int = 8
    constants: Constants = DEFAULT_CONSTANTS
    const_overrides: dict[str, str] = field(default_factory=dict)

    def validate(self) -> "RunConfig":
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")
        if not self.metrics:
            raise ConfigError("no metrics selected")
        if self.or_mode not in ("ci95", "fixed"):
            raise ConfigError(f"or_mode must be ci95 or fixed, got {self.or_mode!r}")
        if self.or_threshold <= 0:
            raise ConfigError("or_threshold must be positive")
        if self.bins < 2:
            raise ConfigError("bins must be >= 2")
        return self

    def snapshot(self) -> str:
        """Resolved configuration in the same key = value format."""
        lines = [
            f"metrics = {','.join(m.label for m in self.metrics)}",
            f"tier2 = {','.join(m.label for m in order_metrics(self.tier2_enabled)) or 'off'}",
            f"jobs = {self.jobs}",
            f"cache = {'on' if self.use_cache else 'off'}",
            f"cache_dir = {self.cache_dir}",
            f"out_dir = {self.out_dir}",
            f"or_mode = {self.or_mode}",
            f"or_threshold = {self.or_threshold!r}",
            f"bins = {self.bins}",
            f"constants_digest = {self.constants.digest()}",
        ]
        for k, v in sorted(self.constants.to_dict().items()):
            if isinstance(v, list):
                v = ",".join(repr(x) for x in v)
            lines.append(f"const.{k} = {v}")
        return "\n".join(lines) + "\n"


def parse_metric_list(text: str) -> list[MetricId]:
    out: list[MetricId] = []
    for tok in text.replace(";", ",").split(","):
        tok = tok.strip()
        if not tok:
            continue
        low = tok.lower()
        if low in ("tier1", "tier-1"):
            out.extend(TIER1)
        elif low in ("tier2", "tier-2"):
            out.extend(TIER2)
        elif low == "all":
            out.extend(MetricId)
        else:
            try:
                out.append(MetricId.parse(tok))
            except ValueError as exc:
                raise ConfigError(str(exc)) from None
    return order_metrics(out)


def _parse_tier2(text: str) -> frozenset[MetricId]:
    low = text.strip().lower()
    if low in _FALSE:
        return frozenset()
    if low in _TRUE or low == "all":
        return frozenset(TIER2)
    chosen = parse_metric_list(text)
    bad = [m.label for m in chosen if m.tier != 2]
    if bad:
        raise ConfigError(f"tier2 lists non-tier-2 metrics: {', '.join(bad)}")
    return frozenset(chosen)


def _bool(text: str, key: str) -> bool:
    low = text.strip().lower()
    if low in _TRUE:
        return True
    if low in _FALSE:
        return False
    raise ConfigError(f"{key}: expected on/off, got {text!r}")


def parse_pairs(text: str, source: str = "<config>") -> dict[str, str]:
    pairs: dict[str, str] = {}
    for n, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{n}: expected key = value")
        k, v = line.split("=", 1)
        pairs[k.strip()] = v.strip()
    return pairs


def apply(cfg: RunConfig, pairs: dict[str, str]) -> RunConfig:
    overrides = dict(cfg.const_overrides)
    for key, val in pairs.items():
        try:
            if key == "metrics":
                cfg.metrics = parse_metric_list(val)
            elif key == "tier2":
                cfg.tier2_enabled = _parse_tier2(val)
            elif key == "jobs":
                cfg.jobs = int(val)
            elif key == "cache":
                cfg.use_cache = _bool(val, key)
            elif key == "cache_dir":
                cfg.cache_dir = Path(val)
            elif key == "out_dir":
                cfg.out_dir = Path(val)
            elif key == "or_mode":
                cfg.or_mode = val.strip().lower()
            elif key == "or_threshold":
                cfg.or_threshold = float(val)
            elif key == "bins":
                cfg.bins = int(val)
            elif key.startswith("const."):
                overrides[key[len("const."):]] = val
            else:
                raise ConfigError(f"unknown config key {key!r}")
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"{key}: {exc}") from None
    if overrides:
        try:
            cfg.constants = DEFAULT_CONSTANTS.with_overrides(overrides)
        except (KeyError, ValueError) as exc:
            raise ConfigError(str(exc)) from None
    cfg.const_overrides = overrides
    return cfg


def load_config(path: str | os.PathLike | None = None, overrides: dict[str, str] | None = None) -> RunConfig:
    cfg = RunConfig()
    if path is not None:
        p = Path(path)
        if not p.is_file():
            raise ConfigError(f"{p}: no such config file")
        cfg = apply(cfg, parse_pairs(p.read_text(encoding="utf-8"), str(p)))
    if overrides:
        cfg = apply(cfg, overrides)
    return cfg.validate()
