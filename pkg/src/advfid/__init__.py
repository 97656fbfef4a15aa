"""Full-reference fidelity metrics for adversarial image pairs, with tools to
benchmark them against subjective scores."""

from __future__ import annotations

__version__ = "0.1.0"

from ._core import BACKEND
from .descriptors import colorfulness, spatial_information
from .imaging import Image, load_image, to_luminance
from .metrics import TIER1, TIER2, MetricId, MetricScore, compute_tier1, compute_tier2, score_all
from .norms import l0_norm, l2_norm, linf_norm
from .stats import evaluate_metric, fit_logistic5, outlier_ratio, plcc, rmse, srocc
from .subjective import mos, mos_histogram, screen_outliers

__all__ = [
    "BACKEND", "TIER1", "TIER2", "Image", "MetricId", "MetricScore", "colorfulness", "compute_tier1", "compute_tier2", "evaluate_metric",
    "fit_logistic5", "l0_norm", "l2_norm", "linf_norm", "load_image", "mos", "mos_histogram",
    "outlier_ratio", "plcc", "rmse", "score_all", "screen_outliers", "spatial_information", "srocc",
    "to_luminance",
]
