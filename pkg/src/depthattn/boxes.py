"""Geometric and raster primitives shared by the tracker, the attention stage
and the evaluation code.

Frames, depth maps, score maps and masks are plain numpy arrays indexed
``[row, col]``; the ``as_*`` helpers validate and normalise them. Boxes are
``(x, y, w, h)`` in real-valued pixel coordinates with ``(x, y)`` the top-left
corner.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np


class EmptyRegionError(ValueError):
    """Raised when a box covers no pixels of a raster."""


@dataclass(frozen=True)
class BoundingBox:
    x: float
    y: float
    w: float
    h: float

    def __post_init__(self):
        for name in ("x", "y", "w", "h"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"box {name} must be finite, got {getattr(self, name)!r}")
        if self.w <= 0 or self.h <= 0:
            raise ValueError(f"box size must be positive, got w={self.w}, h={self.h}")

    def __iter__(self) -> Iterator[float]:
        return iter((self.x, self.y, self.w, self.h))

    @classmethod
    def from_center(cls, cx: float, cy: float, w: float, h: float) -> "BoundingBox":
        return cls(cx - w / 2.0, cy - h / 2.0, w, h)

    @property
    def center(self) -> tuple[float, float]:
        return (self.x + self.w / 2.0, self.y + self.h / 2.0)

    @property
    def area(self) -> float:
        return self.w * self.h

    def to_list(self) -> list[float]:
        return [float(self.x), float(self.y), float(self.w), float(self.h)]


def iou(a: BoundingBox, b: BoundingBox) -> float:
    """Intersection over union of two boxes; 0 when they are disjoint."""
    iw = min(a.x + a.w, b.x + b.w) - max(a.x, b.x)
    ih = min(a.y + a.h, b.y + b.h) - max(a.y, b.y)
    if iw <= 0 or ih <= 0:
        return 0.0
    inter = iw * ih
    union = a.area + b.area - inter
    return min(1.0, max(0.0, inter / union))


def center_error(a: BoundingBox, b: BoundingBox) -> float:
    (ax, ay), (bx, by) = a.center, b.center
    return math.hypot(ax - bx, ay - by)


def clip_to_frame(box: BoundingBox, width: float, height: float) -> BoundingBox | None:
    """Intersect ``box`` with ``[0, width) x [0, height)``.

    Returns None when the intersection has zero area.
    """
    if width <= 0 or height <= 0:
        raise ValueError("frame size must be positive")
    x0, y0 = max(box.x, 0.0), max(box.y, 0.0)
    x1, y1 = min(box.x + box.w, float(width)), min(box.y + box.h, float(height))
    if x1 <= x0 or y1 <= y0:
        return None
    return BoundingBox(x0, y0, x1 - x0, y1 - y0)


def rasterize(box: BoundingBox, width: int, height: int) -> tuple[slice, slice]:
    """Row/column slices of the pixels touched by ``box``.

    Left/top edges are floored and right/bottom edges ceiled so no target
    pixel is dropped; the result is clipped to the raster.
    """
    c0 = max(int(math.floor(box.x)), 0)
    r0 = max(int(math.floor(box.y)), 0)
    c1 = min(int(math.ceil(box.x + box.w)), width)
    r1 = min(int(math.ceil(box.y + box.h)), height)
    if c1 <= c0 or r1 <= r0:
        raise EmptyRegionError(f"box {box.to_list()} covers no pixels of a {width}x{height} raster")
    return slice(r0, r1), slice(c0, c1)


def as_frame(data) -> np.ndarray:
    """Validate an image as an ``(H, W)`` or ``(H, W, C)`` float array in [0, 1].

    uint8 input is scaled by 1/255.
    """
    arr = np.asarray(data)
    if arr.dtype == np.uint8:
        arr = arr.astype(np.float64) / 255.0
    else:
        arr = arr.astype(np.float64, copy=False)
    if arr.ndim == 3 and arr.shape[2] not in (1, 3):
        raise ValueError(f"frame must have 1 or 3 channels, got {arr.shape[2]}")
    if arr.ndim not in (2, 3):
        raise ValueError(f"frame must be 2-D or 3-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)) or arr.min(initial=0.0) < 0.0 or arr.max(initial=0.0) > 1.0:
        raise ValueError("frame values must be finite and in [0, 1]")
    return arr


def as_depth(data) -> np.ndarray:
    """Validate a single-channel, finite, nonnegative depth raster."""
    arr = np.asarray(data, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"depth map must be 2-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)) or arr.min(initial=0.0) < 0.0:
        raise ValueError("depth values must be finite and nonnegative")
    return arr
