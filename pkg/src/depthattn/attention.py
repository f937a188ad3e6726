"""Depth attention: suppress pixels whose depth departs from the target's.

Per frame the pipeline is

1. reference statistics (median and MAD of depth inside the target box),
   refreshed on a fixed frame interval;
2. a robust z-score of every pixel's depth against that reference;
3. a binary mask keeping pixels with z-score at most ``th``;
4. a blend ``(1 - k1) * I + k1 * I * mask`` whose weight ``k1`` comes from
   how typical the latest peak-to-sidelobe ratio is within a short window.

State is threaded through the loop as an immutable :class:`DAState`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .boxes import BoundingBox, as_depth, as_frame, rasterize

MAD_FLOOR = 1e-6
SIGMA_FLOOR = 1e-6


@dataclass(frozen=True)
class ReferenceDepth:
    median: float
    mad: float
    source_frame_index: int

    def __post_init__(self):
        if not math.isfinite(self.median) or not math.isfinite(self.mad) or self.mad < 0:
            raise ValueError(f"invalid reference depth {self}")


@dataclass(frozen=True)
class PsrWindow:
    capacity: int = 5
    values: tuple[float, ...] = ()

    def __post_init__(self):
        if self.capacity < 1:
            raise ValueError("window capacity must be >= 1")
        if len(self.values) > self.capacity:
            raise ValueError("window holds more values than its capacity")

    @property
    def full(self) -> bool:
        return len(self.values) == self.capacity

    def push(self, value: float) -> "PsrWindow":
        value = float(value)
        if not math.isfinite(value):
            raise ValueError(f"PSR must be finite, got {value!r}")
        values = self.values + (value,)
        return replace(self, values=values[-self.capacity:])


@dataclass(frozen=True)
class DAConfig:
    """Depth attention settings.

    ``k1`` is either the string ``"adaptive"`` or a fixed blend weight in
    [0, 1]; small fixed values such as 0.02 work well.
    """

    th: float = 1.5
    psr_window: int = 5
    ref_update_interval: int = 60
    k1: float | str = "adaptive"

    def __post_init__(self):
        if not self.th > 0:
            raise ValueError("th must be positive")
        if self.psr_window < 1:
            raise ValueError("psr_window must be >= 1")
        if self.ref_update_interval < 1:
            raise ValueError("ref_update_interval must be >= 1")
        if isinstance(self.k1, str):
            if self.k1 != "adaptive":
                raise ValueError(f"k1 must be 'adaptive' or a number, got {self.k1!r}")
        elif not 0.0 <= self.k1 <= 1.0:
            raise ValueError("fixed k1 must lie in [0, 1]")

    @property
    def adaptive(self) -> bool:
        return isinstance(self.k1, str)

    def to_dict(self) -> dict:
        return {
            "th": self.th,
            "psr_window": self.psr_window,
            "ref_update_interval": self.ref_update_interval,
            "k1": self.k1 if self.adaptive else float(self.k1),
        }


@dataclass(frozen=True)
class DAState:
    config: DAConfig = field(default_factory=DAConfig)
    ref: ReferenceDepth | None = None
    psr: PsrWindow = None  # type: ignore[assignment]
    frames_since_ref: int = 0
    last_k1: float = 0.0

    def __post_init__(self):
        if self.psr is None:
            object.__setattr__(self, "psr", PsrWindow(self.config.psr_window))
        if not 0 <= self.frames_since_ref < self.config.ref_update_interval:
            raise ValueError("frames_since_ref out of range")


def robust_stats(depth, box: BoundingBox, frame_index: int = 0) -> ReferenceDepth:
    """Median and median absolute deviation of the depth inside ``box``."""
    depth = as_depth(depth)
    rows, cols = rasterize(box, depth.shape[1], depth.shape[0])
    region = depth[rows, cols]
    med = float(np.median(region))
    mad = float(np.median(np.abs(region - med)))
    return ReferenceDepth(med, mad, int(frame_index))


def z_kernel(depth, ref: ReferenceDepth) -> np.ndarray:
    depth = as_depth(depth)
    return np.abs(depth - ref.median) / max(ref.mad, MAD_FLOOR)


def threshold_mask(z: np.ndarray, th: float) -> np.ndarray:
    """1 where ``z <= th`` (boundary kept), else 0, as uint8."""
    if not th > 0:
        raise ValueError("th must be positive")
    return (np.asarray(z) <= th).astype(np.uint8)


def psr_weights(values) -> np.ndarray:
    """Normalised Gaussian densities of each window value under the window's
    own population mean and standard deviation.

    The density's normalising constant cancels in the ratio, so only the
    exponent is evaluated (shifted by its maximum for stability).
    """
    v = np.asarray(values, dtype=np.float64)
    sigma = max(float(v.std()), SIGMA_FLOOR)
    log_p = -0.5 * ((v - v.mean()) / sigma) ** 2
    p = np.exp(log_p - log_p.max())
    return p / p.sum()


def estimate_k1(window: PsrWindow) -> float:
    """Blend weight from the PSR window; 0 until the window is full."""
    if not window.full:
        return 0.0
    return float(psr_weights(window.values)[-1])


def modulate(frame, mask, k1: float) -> np.ndarray:
    frame = as_frame(frame)
    mask = np.asarray(mask)
    if mask.shape != frame.shape[:2]:
        raise ValueError(f"mask shape {mask.shape} does not match frame shape {frame.shape[:2]}")
    if not 0.0 <= k1 <= 1.0:
        raise ValueError("k1 must lie in [0, 1]")
    if k1 == 0.0:
        return frame.copy()
    m = mask.astype(np.float64)
    if frame.ndim == 3:
        m = m[:, :, None]
    # keep mask==1 pixels bit-exact instead of relying on (1-k1)*I + k1*I
    return np.where(m == 1.0, frame, (1.0 - k1) * frame + k1 * frame * m)


def push_psr(state: DAState, psr: float) -> DAState:
    return replace(state, psr=state.psr.push(psr))


def advance(state: DAState) -> DAState:
    """Advance the refresh counter without touching the reference."""
    return replace(state, frames_since_ref=(state.frames_since_ref + 1) % state.config.ref_update_interval)


def da_process_frame(state: DAState, frame, depth, prev_box: BoundingBox, frame_index: int):
    """Modulate one frame.

    Returns ``(modulated, mask, k1_used, new_state)``. The reference depth is
    recomputed from ``prev_box`` whenever the refresh counter is at 0 or no
    reference exists yet. Raises :class:`EmptyRegionError` if that box misses
    the depth raster; the caller should pass the frame through and call
    :func:`advance`.
    """
    frame = as_frame(frame)
    depth = as_depth(depth)
    if depth.shape != frame.shape[:2]:
        raise ValueError(f"depth shape {depth.shape} does not match frame shape {frame.shape[:2]}")

    ref = state.ref
    if ref is None or state.frames_since_ref == 0:
        ref = robust_stats(depth, prev_box, frame_index)

    mask = threshold_mask(z_kernel(depth, ref), state.config.th)
    k1 = estimate_k1(state.psr) if state.config.adaptive else float(state.config.k1)
    out = modulate(frame, mask, k1)
    new_state = replace(
        advance(state),
        ref=ref,
        last_k1=k1,
    )
    return out, mask, k1, new_state
