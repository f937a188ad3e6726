"""Depth attention for correlation-filter tracking.

Depth maps gate a confidence-weighted dimming of every pixel whose depth is
atypical for the target, upstream of an unmodified RGB tracker.
"""
from .attention import (
    DAConfig,
    DAState,
    PsrWindow,
    ReferenceDepth,
    da_process_frame,
    estimate_k1,
    modulate,
    push_psr,
    robust_stats,
    threshold_mask,
    z_kernel,
)
from .boxes import BoundingBox, EmptyRegionError, center_error, clip_to_frame, iou
from .evaluation import MetricReport, evaluate
from .tracker import TrackerConfig, TrackResult, track_sequence

__version__ = "0.1.0"

__all__ = [
    "BoundingBox", "EmptyRegionError", "center_error", "clip_to_frame", "iou",
    "DAConfig", "DAState", "PsrWindow", "ReferenceDepth", "da_process_frame", "estimate_k1",
    "modulate", "push_psr", "robust_stats", "threshold_mask", "z_kernel",
    "TrackerConfig", "TrackResult", "track_sequence", "MetricReport", "evaluate",
]
