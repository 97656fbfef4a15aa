"""Metric registry, tier gating and batch scoring."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Collection, Iterable

from .. import norms
from ..imaging import Image, as_image
from . import fsim as _fsim
from . import gradient, mad as _mad, nqm as _nqm, snr, ssim as _ssim, vif as _vif, vsi as _vsi, vsnr as _vsnr
from .constants import DEFAULT_CONSTANTS, Constants

UNBOUNDED = "unbounded-perfect"


class Polarity(enum.Enum):
    HIGHER = "higher-is-better"
    LOWER = "lower-is-better"


class MetricId(enum.Enum):
    """Benchmarked metrics in report order; value is (label, tier, polarity, perfect value)."""

    SSIM = ("SSIM", 1, Polarity.HIGHER, 1.0)
    MS_SSIM = ("MS-SSIM", 1, Polarity.HIGHER, 1.0)
    VSI = ("VSI", 2, Polarity.HIGHER, 1.0)
    VIF = ("VIF", 2, Polarity.HIGHER, 1.0)
    VIFP = ("VIFp", 1, Polarity.HIGHER, 1.0)
    MAD = ("MAD", 2, Polarity.LOWER, 0.0)
    WSNR = ("WSNR", 1, Polarity.HIGHER, math.inf)
    FSIM = ("FSIM", 2, Polarity.HIGHER, 1.0)
    FSIMC = ("FSIMc", 2, Polarity.HIGHER, 1.0)
    PSNR = ("PSNR", 1, Polarity.HIGHER, math.inf)
    UQI = ("UQI", 1, Polarity.HIGHER, 1.0)
    IFC = ("IFC", 2, Polarity.HIGHER, math.inf)
    NQM = ("NQM", 2, Polarity.HIGHER, math.inf)
    GSIM = ("GSIM", 1, Polarity.HIGHER, 1.0)
    VSNR = ("VSNR", 2, Polarity.HIGHER, math.inf)
    L0 = ("L0", 1, Polarity.LOWER, 0.0)
    L2 = ("L2", 1, Polarity.LOWER, 0.0)
    LINF = ("Linf", 1, Polarity.LOWER, 0.0)

    @property
    def label(self) -> str:
        return self.value[0]

    @property
    def tier(self) -> int:
        return self.value[1]

    @property
    def polarity(self) -> Polarity:
        return self.value[2]

    @property
    def perfect(self) -> float:
        return self.value[3]

    @property
    def is_norm(self) -> bool:
        return self in (MetricId.L0, MetricId.L2, MetricId.LINF)

    @classmethod
    def parse(cls, name: str) -> "MetricId":
        key = name.strip().lower().replace("_", "-")
        for m in cls:
            if m.label.lower() == key or m.name.lower().replace("_", "-") == key:
                return m
        aliases = {"l-inf": cls.LINF, "linfinity": cls.LINF, "l∞": cls.LINF}
        if key in aliases:
            return aliases[key]
        raise ValueError(f"unknown metric {name!r}")


TIER1 = tuple(m for m in MetricId if m.tier == 1)
TIER2 = tuple(m for m in MetricId if m.tier == 2)


class MetricNotEnabledError(RuntimeError):
    pass


@dataclass(frozen=True)
class MetricScore:
    metric: MetricId
    value: float
    pair_id: str
    error: str | None = None
    flags: tuple[str, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return self.error is None

    @property
    def unbounded(self) -> bool:
        return UNBOUNDED in self.flags


def _ms_ssim(ref, dist, const):
    value, scales = _ssim.ms_ssim_detail(ref, dist, const)
    full = len(const.ms_ssim_weights)
    return value, (() if scales == full else (f"reduced-scales={scales}",))


_TIER1_FUNCS: dict[MetricId, Callable] = {
    MetricId.PSNR: lambda r, d, c: snr.psnr(r, d, c.dynamic_range),
    MetricId.SSIM: _ssim.ssim,
    MetricId.UQI: _ssim.uqi,
    MetricId.GSIM: gradient.gsim,
    MetricId.WSNR: snr.wsnr,
    MetricId.VIFP: _vif.vifp,
    MetricId.L0: lambda r, d, c: float(norms.l0_norm(r, d)),
    MetricId.L2: lambda r, d, c: norms.l2_norm(r, d),
    MetricId.LINF: lambda r, d, c: norms.linf_norm(r, d),
}

_TIER2_FUNCS: dict[MetricId, Callable] = {
    MetricId.FSIM: _fsim.fsim,
    MetricId.FSIMC: _fsim.fsimc,
    MetricId.VSI: _vsi.vsi,
    MetricId.NQM: _nqm.nqm,
    MetricId.VSNR: _vsnr.vsnr,
    MetricId.IFC: _vif.ifc,
    MetricId.VIF: _vif.vif,
    MetricId.MAD: _mad.mad,
}


def _finish(metric: MetricId, value: float, pair_id: str, flags=()) -> MetricScore:
    flags = tuple(flags)
    if math.isinf(value) and value > 0:
        flags += (UNBOUNDED,)
    elif not math.isfinite(value):
        raise ArithmeticError(f"{metric.label} produced a non-finite value")
    return MetricScore(metric, float(value), pair_id, None, flags)


def compute_tier1(metric: MetricId, ref: Image, dist: Image, pair_id: str = "",
                  const: Constants = DEFAULT_CONSTANTS) -> MetricScore:
    if metric.tier != 1:
        raise ValueError(f"{metric.label} is not a tier-1 metric")
    if metric is MetricId.MS_SSIM:
        value, flags = _ms_ssim(ref, dist, const)
        return _finish(metric, value, pair_id, flags)
    return _finish(metric, _TIER1_FUNCS[metric](ref, dist, const), pair_id)


def compute_tier2(metric: MetricId, ref: Image, dist: Image, pair_id: str = "",
                  const: Constants = DEFAULT_CONSTANTS,
                  enabled: Collection[MetricId] = ()) -> MetricScore:
    """Score one extended-tier metric; raises unless ``metric`` is in ``enabled``."""
    if metric.tier != 2:
        raise ValueError(f"{metric.label} is not a tier-2 metric")
    if metric not in enabled:
        raise MetricNotEnabledError(f"{metric.label} is not enabled (tier-2 metrics are opt-in)")
    return _finish(metric, _TIER2_FUNCS[metric](ref, dist, const), pair_id)


def order_metrics(metrics: Iterable[MetricId]) -> list[MetricId]:
    """Deduplicate and sort into report order."""
    wanted = set(metrics)
    return [m for m in MetricId if m in wanted]


def score_all(ref, dist, metrics: Iterable[MetricId], pair_id: str = "",
              const: Constants = DEFAULT_CONSTANTS,
              enabled_tier2: Collection[MetricId] = ()) -> list[MetricScore]:
    """One score per metric in report order; failures are recorded per entry."""
    ordered = order_metrics(metrics)
    if not ordered:
        raise ValueError("no metrics requested")
    ref = as_image(ref)
    dist = as_image(dist)
    out = []
    for m in ordered:
        try:
            if m.tier == 1:
                out.append(compute_tier1(m, ref, dist, pair_id, const))
            else:
                out.append(compute_tier2(m, ref, dist, pair_id, const, enabled_tier2))
        except Exception as exc:  # noqa: BLE001 - reported per entry
            out.append(MetricScore(m, math.nan, pair_id, f"{type(exc).__name__}: {exc}"))
    return out


__all__ = [
    "DEFAULT_CONSTANTS", "Constants", "MetricId", "MetricNotEnabledError", "MetricScore",
    "Polarity", "TIER1", "TIER2", "UNBOUNDED", "compute_tier1", "compute_tier2",
    "order_metrics", "score_all",
]
