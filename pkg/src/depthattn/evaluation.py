"""One-pass evaluation metrics over per-frame predicted and ground-truth boxes.

Boxes may be given as :class:`BoundingBox` objects or as ``(N, 4)`` arrays of
``[x, y, w, h]``. IoU thresholds use strict inequality (``IoU > t``); centre
distance thresholds are inclusive.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

IOU_THRESHOLDS = np.arange(21) / 20.0
NORM_PRECISION_THRESHOLDS = np.arange(101) / 200.0
PRECISION_RADIUS = 20.0
HIST_BIN_WIDTH = 0.1
HIST_RANGE = 5.0


def _as_boxes(boxes) -> np.ndarray:
    if not isinstance(boxes, np.ndarray):
        boxes = [list(b) for b in boxes]
    return np.asarray(boxes, dtype=np.float64).reshape(-1, 4)


def _pair(pred, gt) -> tuple[np.ndarray, np.ndarray]:
    p, g = _as_boxes(pred), _as_boxes(gt)
    if len(p) != len(g):
        raise ValueError(f"length mismatch: {len(p)} predictions vs {len(g)} ground-truth boxes")
    if len(p) == 0:
        raise ValueError("need at least one frame")
    return p, g


def overlaps(pred, gt) -> np.ndarray:
    """Per-frame IoU."""
    p, g = _pair(pred, gt)
    iw = np.minimum(p[:, 0] + p[:, 2], g[:, 0] + g[:, 2]) - np.maximum(p[:, 0], g[:, 0])
    ih = np.minimum(p[:, 1] + p[:, 3], g[:, 1] + g[:, 3]) - np.maximum(p[:, 1], g[:, 1])
    inter = np.clip(iw, 0, None) * np.clip(ih, 0, None)
    union = p[:, 2] * p[:, 3] + g[:, 2] * g[:, 3] - inter
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where(union > 0, inter / union, 0.0)
    return np.clip(out, 0.0, 1.0)


def centers(boxes: np.ndarray) -> np.ndarray:
    return boxes[:, :2] + boxes[:, 2:] / 2.0


def success_auc(pred, gt) -> tuple[np.ndarray, float]:
    ious = overlaps(pred, gt)
    curve = (ious[None, :] > IOU_THRESHOLDS[:, None]).mean(axis=1)
    return curve, float(curve.mean())


def _valid_gt(g: np.ndarray) -> np.ndarray:
    return (g[:, 2] > 0) & (g[:, 3] > 0)


def precision_metrics(pred, gt, thresholds=NORM_PRECISION_THRESHOLDS) -> tuple[float, float]:
    """``(precision_at_20, normalized_precision)``.

    Frames whose ground truth has nonpositive width or height are left out
    of both rates.
    """
    p, g = _pair(pred, gt)
    valid = _valid_gt(g)
    p, g = p[valid], g[valid]
    if len(g) == 0:
        return 0.0, 0.0
    d = centers(p) - centers(g)
    prec = float((np.hypot(d[:, 0], d[:, 1]) <= PRECISION_RADIUS).mean())
    nd = np.hypot(d[:, 0] / g[:, 2], d[:, 1] / g[:, 3])
    curve = (nd[None, :] <= np.asarray(thresholds)[:, None]).mean(axis=1)
    return prec, float(curve.mean())


def overlap_metrics(pred, gt) -> dict[str, float]:
    ious = overlaps(pred, gt)
    op50 = float((ious > 0.5).mean())
    op75 = float((ious > 0.75).mean())
    return {"ao": float(ious.mean()), "op50": op50, "op75": op75, "sr50": op50, "sr75": op75}


@dataclass
class MetricReport:
    auc: float
    success_curve: list[float]
    precision_at_20: float
    normalized_precision: float
    ao: float
    op50: float
    op75: float
    sr50: float
    sr75: float
    frame_count: int
    excluded_frames: int = 0

    def to_dict(self) -> dict:
        return asdict(self)


def evaluate(pred, gt, np_thresholds=NORM_PRECISION_THRESHOLDS) -> MetricReport:
    curve, auc = success_auc(pred, gt)
    prec, norm_prec = precision_metrics(pred, gt, np_thresholds)
    return MetricReport(
        auc=auc,
        success_curve=[float(v) for v in curve],
        precision_at_20=prec,
        normalized_precision=norm_prec,
        frame_count=len(_as_boxes(gt)),
        excluded_frames=int((~_valid_gt(_as_boxes(gt))).sum()),
        **overlap_metrics(pred, gt),
    )


@dataclass
class DisplacementHistogram:
    edges: list[float]
    counts: list[int]  # last entry is the overflow bin (>= HIST_RANGE)
    samples: int
    fraction_below_one: float
    window: int

    def to_dict(self) -> dict:
        return asdict(self)


def displacements(gt, window: int = 5) -> np.ndarray:
    """Normalised Manhattan displacement of the box centre over ``window``
    frames, in units of the current box width/height."""
    g = _as_boxes(gt)
    if window < 1:
        raise ValueError("window must be >= 1")
    if len(g) <= window:
        raise ValueError(f"sequence of {len(g)} frames too short for window {window}")
    c = centers(g)
    d = np.abs(c[window:] - c[:-window])
    return d[:, 0] / g[window:, 2] + d[:, 1] / g[window:, 3]


def histogram(values, window: int = 5) -> DisplacementHistogram:
    values = np.asarray(values, dtype=np.float64)
    nbins = int(round(HIST_RANGE / HIST_BIN_WIDTH))
    edges = np.arange(nbins + 1) * HIST_BIN_WIDTH
    # integer binning avoids float-edge surprises (0.3 / 0.1 etc.)
    idx = np.minimum(np.floor(np.round(values / HIST_BIN_WIDTH, 9)).astype(np.int64), nbins)
    counts = np.bincount(idx, minlength=nbins + 1)
    return DisplacementHistogram(
        edges=[float(e) for e in edges],
        counts=[int(c) for c in counts],
        samples=int(values.size),
        fraction_below_one=float((values < 1.0).mean()) if values.size else 0.0,
        window=window,
    )


def displacement_stats(gt, window: int = 5) -> DisplacementHistogram:
    return histogram(displacements(gt, window), window)


def psr_series(result) -> list[tuple[int, float]]:
    return [(r.i, r.psr) for r in result.frames]
