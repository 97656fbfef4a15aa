"""Canonical constants for every fidelity metric, in one table.

Values follow the reference implementations published with each metric.
The table is serialized into run reports and hashed into cache keys, so any
override changes both.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, fields, replace
from typing import Any


@dataclass(frozen=True)
class Constants:
    # SSIM family
    ssim_window: int = 11
    ssim_sigma: float = 1.5
    ssim_k1: float = 0.01
    ssim_k2: float = 0.03
    dynamic_range: float = 255.0
    ms_ssim_weights: tuple[float, ...] = (0.0448, 0.2856, 0.3001, 0.2363, 0.1333)
    uqi_window: int = 8

    # GSIM
    gsim_c: float = 170.0
    gsim_operator: str = "sobel"
    gsim_luminance_weight: float = 0.1
    gsim_variant: str = "gradient-similarity+luminance-blend"

    # WSNR: CSF evaluated with the image Nyquist frequency mapped to this many cycles/degree
    wsnr_nyquist_cpd: float = 32.0

    # VIFp / VIF / IFC
    vifp_sigma_nsq: float = 2.0
    vifp_scales: int = 4
    vif_sigma_nsq: float = 0.4
    vif_levels: int = 4
    vif_orientations: int = 6
    vif_block: int = 3
    ifc_levels: int = 3

    # FSIM / FSIMc
    fsim_t1: float = 0.85
    fsim_t2: float = 160.0
    fsim_t3: float = 200.0
    fsim_t4: float = 200.0
    fsim_lambda: float = 0.03
    pc_scales: int = 4
    pc_orientations: int = 4
    pc_min_wavelength: float = 6.0
    pc_mult: float = 2.0
    pc_sigma_on_f: float = 0.55
    pc_dtheta_on_sigma: float = 1.2
    pc_k: float = 2.0

    # VSI
    vsi_c1: float = 1.27
    vsi_c2: float = 386.0
    vsi_c3: float = 130.0
    vsi_alpha: float = 0.40
    vsi_beta: float = 0.02
    sdsp_sigma_f: float = 1.34
    sdsp_omega0: float = 0.021
    sdsp_sigma_d: float = 145.0
    sdsp_sigma_c: float = 0.001

    # NQM
    nqm_viewing_angle: float = 4.0

    # VSNR
    vsnr_alpha: float = 0.04
    vsnr_levels: int = 5
    vsnr_dpi: float = 96.0
    vsnr_distance_in: float = 19.1
    vsnr_masking_exponent: float = 0.6

    # MAD
    mad_block: int = 16
    mad_step: int = 4
    mad_scale_weights: tuple[float, ...] = (0.5, 0.75, 1.0, 5.0, 6.0)
    mad_beta1: float = 0.467
    mad_beta2: float = 0.130
    mad_log_contrast_threshold: float = -5.0
    mad_nfreq: float = 32.0
    mad_gabor_min_wavelength: float = 3.0
    mad_gabor_mult: float = 3.0
    mad_gabor_sigma_on_f: float = 0.55
    mad_gabor_dtheta_on_sigma: float = 1.5
    mad_orientations: int = 4

    # display model shared by MAD and VSNR: L = (b + k * pixel) ** gamma
    display_k: float = 0.02874
    display_gamma: float = 2.2

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        for k, v in d.items():
            if isinstance(v, tuple):
                d[k] = list(v)
        return d

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]

    def with_overrides(self, overrides: dict[str, Any]) -> "Constants":
        known = {f.name: f for f in fields(self)}
        kw = {}
        for key, raw in overrides.items():
            if key not in known:
                raise KeyError(f"unknown constant {key!r}")
            current = getattr(self, key)
            kw[key] = _coerce(raw, current)
        return replace(self, **kw)


def _coerce(raw: Any, current: Any) -> Any:
    if not isinstance(raw, str):
        return tuple(raw) if isinstance(current, tuple) else type(current)(raw)
    if isinstance(current, bool):
        return raw.strip().lower() in ("1", "true", "yes", "on")
    if isinstance(current, int):
        return int(raw)
    if isinstance(current, float):
        return float(raw)
    if isinstance(current, tuple):
        return tuple(float(x) for x in raw.replace(";", ",").split(",") if x.strip())
    return raw.strip()


DEFAULT_CONSTANTS = Constants()
