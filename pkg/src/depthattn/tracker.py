"""MOSSE-style discriminative correlation filter tracker.

The filter is the closed-form frequency-domain ridge solution
``H* = A / B`` with ``A = G . conj(F)`` and ``B = F . conj(F) + reg``,
blended over time with a fixed learning rate. Target size is held fixed;
only the position is updated, at integer patch resolution.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np
from scipy import ndimage

from .attention import DAConfig, DAState, advance, da_process_frame, push_psr
from .boxes import BoundingBox, EmptyRegionError, as_frame

STD_FLOOR = 1e-6
PSR_STD_FLOOR = 1e-6


@dataclass(frozen=True)
class TrackerConfig:
    patch_size: int = 64
    search_scale: float = 2.0
    lr: float = 0.125
    regularization: float = 1e-4
    sigma: float | None = None  # defaults to patch_size / 16
    psr_exclusion: int = 5

    def __post_init__(self):
        if self.patch_size < 2 * self.psr_exclusion + 2:
            raise ValueError("patch_size too small for the PSR exclusion window")
        if self.search_scale <= 0:
            raise ValueError("search_scale must be positive")
        if not 0.0 <= self.lr <= 1.0:
            raise ValueError("lr must lie in [0, 1]")
        if self.regularization <= 0:
            raise ValueError("regularization must be positive")

    @property
    def label_sigma(self) -> float:
        return self.sigma if self.sigma is not None else self.patch_size / 16.0

    def to_dict(self) -> dict:
        return {
            "patch_size": self.patch_size,
            "search_scale": self.search_scale,
            "lr": self.lr,
            "regularization": self.regularization,
            "sigma": self.label_sigma,
            "psr_exclusion": self.psr_exclusion,
        }


@dataclass(frozen=True)
class CorrelationFilter:
    numerator: np.ndarray
    denominator: np.ndarray
    learning_rate: float = 0.125
    regularization: float = 1e-4

    @property
    def size(self) -> tuple[int, int]:
        h, w = self.numerator.shape
        return (w, h)


@dataclass(frozen=True)
class FrameRecord:
    i: int
    box: BoundingBox
    psr: float
    k1: float


@dataclass
class TrackResult:
    sequence_id: str
    mode: str  # "baseline" or "depth-attention"
    config: dict = field(default_factory=dict)
    frames: list[FrameRecord] = field(default_factory=list)

    @property
    def boxes(self) -> list[BoundingBox]:
        return [r.box for r in self.frames]


def gaussian_label(w: int, h: int, sigma: float) -> np.ndarray:
    """Isotropic Gaussian peaking at 1 on pixel ``(h // 2, w // 2)``."""
    if w < 1 or h < 1 or sigma <= 0:
        raise ValueError("label needs w, h >= 1 and sigma > 0")
    ys = np.arange(h) - h // 2
    xs = np.arange(w) - w // 2
    return np.exp(-(ys[:, None] ** 2 + xs[None, :] ** 2) / (2.0 * sigma**2))


def crop_resample(frame: np.ndarray, box: BoundingBox, out_size: tuple[int, int]) -> np.ndarray:
    """Bilinear resample of ``box`` onto an ``out_size = (w, h)`` grid,
    replicating edge pixels outside the frame. Colour frames are averaged
    to grayscale first."""
    gray = frame.mean(axis=2) if frame.ndim == 3 else frame
    ow, oh = out_size
    xs = box.x + (np.arange(ow) + 0.5) * (box.w / ow) - 0.5
    ys = box.y + (np.arange(oh) + 0.5) * (box.h / oh) - 0.5
    yy, xx = np.meshgrid(ys, xs, indexing="ij")
    return ndimage.map_coordinates(gray, [yy, xx], order=1, mode="nearest")


def preprocess_patch(frame, box: BoundingBox, out_size: tuple[int, int]) -> np.ndarray:
    frame = as_frame(frame)
    patch = np.log1p(crop_resample(frame, box, out_size))
    ow, oh = out_size
    if np.ptp(patch) == 0.0:
        return np.zeros((oh, ow))
    patch = (patch - patch.mean()) / max(float(patch.std()), STD_FLOOR)
    return patch * np.outer(np.hanning(oh), np.hanning(ow))


def train_update(filt: CorrelationFilter | None, patch, label, lr: float = 0.125,
                 regularization: float = 1e-4) -> CorrelationFilter:
    patch = np.asarray(patch, dtype=np.float64)
    label = np.asarray(label, dtype=np.float64)
    if patch.shape != label.shape:
        raise ValueError(f"patch shape {patch.shape} does not match label shape {label.shape}")
    F = np.fft.fft2(patch)
    G = np.fft.fft2(label)
    if filt is None:
        return CorrelationFilter(G * np.conj(F), F * np.conj(F) + regularization, lr, regularization)
    if filt.numerator.shape != patch.shape:
        raise ValueError(f"patch shape {patch.shape} does not match filter shape {filt.numerator.shape}")
    a = lr * (G * np.conj(F)) + (1.0 - lr) * filt.numerator
    b = lr * (F * np.conj(F) + filt.regularization) + (1.0 - lr) * filt.denominator
    return CorrelationFilter(a, b, filt.learning_rate, filt.regularization)


def respond(filt: CorrelationFilter, patch) -> np.ndarray:
    patch = np.asarray(patch, dtype=np.float64)
    if patch.shape != filt.numerator.shape:
        raise ValueError(f"patch shape {patch.shape} does not match filter shape {filt.numerator.shape}")
    return np.real(np.fft.ifft2(filt.numerator / filt.denominator * np.fft.fft2(patch)))


def psr(score, exclusion_radius: int = 5) -> float:
    """Peak-to-sidelobe ratio; the sidelobe excludes a square of side
    ``2 * exclusion_radius + 1`` centred on the peak."""
    score = np.asarray(score, dtype=np.float64)
    side = 2 * exclusion_radius + 1
    if score.size <= side * side:
        raise ValueError(f"score map of {score.size} pixels too small for exclusion radius {exclusion_radius}")
    r, c = np.unravel_index(np.argmax(score), score.shape)
    keep = np.ones(score.shape, dtype=bool)
    keep[max(r - exclusion_radius, 0):r + exclusion_radius + 1,
         max(c - exclusion_radius, 0):c + exclusion_radius + 1] = False
    side_lobe = score[keep]
    return float((score[r, c] - side_lobe.mean()) / max(float(side_lobe.std()), PSR_STD_FLOOR))


def search_box(box: BoundingBox, scale: float) -> BoundingBox:
    cx, cy = box.center
    return BoundingBox.from_center(cx, cy, box.w * scale, box.h * scale)


def locate(response: np.ndarray) -> tuple[int, int]:
    """Peak displacement ``(dx, dy)`` from the patch centre, in patch pixels.
    A flat response yields no displacement."""
    if np.ptp(response) == 0.0:
        return 0, 0
    h, w = response.shape
    r, c = np.unravel_index(np.argmax(response), response.shape)
    return int(c - w // 2), int(r - h // 2)


def _modulate(state, frame, depth, box, i):
    if state is None:
        return frame, None, 0.0, None
    try:
        out, mask, k1, state = da_process_frame(state, frame, depth, box, i)
    except EmptyRegionError:
        return frame, None, 0.0, advance(state)
    return out, mask, k1, state


def track_sequence(frames: Iterable, depths: Iterable | None, init_box: BoundingBox,
                   config: TrackerConfig | None = None, da_config: DAConfig | None = None,
                   sequence_id: str = "", on_frame=None) -> TrackResult:
    """One-pass tracking from ``init_box`` on the first frame.

    With ``da_config`` every frame is first passed through depth attention
    (``depths`` must then be given, one per frame). ``on_frame`` is called as
    ``on_frame(i, modulated_frame, box, mask)`` for side outputs such as
    overlays.
    """
    config = config or TrackerConfig()
    if da_config is not None and depths is None:
        raise ValueError("depth maps required for depth attention")
    depth_iter = iter(depths) if depths is not None else None
    state = DAState(da_config) if da_config is not None else None

    size = (config.patch_size, config.patch_size)
    label = gaussian_label(*size, config.label_sigma)
    result = TrackResult(
        sequence_id=sequence_id,
        mode="baseline" if da_config is None else "depth-attention",
        config={"tracker": config.to_dict(), "da": None if da_config is None else da_config.to_dict()},
    )

    box = init_box
    filt = None
    for i, frame in enumerate(frames):
        frame = as_frame(frame)
        fh, fw = frame.shape[:2]
        depth = next(depth_iter) if depth_iter is not None else None
        if depth_iter is not None and depth is None:
            raise ValueError(f"missing depth map for frame {i}")
        frame_in, mask, k1, state = _modulate(state, frame, depth, box, i)

        if filt is None:
            patch = preprocess_patch(frame_in, search_box(box, config.search_scale), size)
            filt = train_update(None, patch, label, 1.0, config.regularization)
            score = psr(respond(filt, patch), config.psr_exclusion)
        else:
            region = search_box(box, config.search_scale)
            response = respond(filt, preprocess_patch(frame_in, region, size))
            dx, dy = locate(response)
            cx, cy = box.center
            cx = min(max(cx + dx * region.w / size[0], 0.0), fw - 1.0)
            cy = min(max(cy + dy * region.h / size[1], 0.0), fh - 1.0)
            box = BoundingBox.from_center(cx, cy, box.w, box.h)
            score = psr(response, config.psr_exclusion)
            if state is not None:
                state = push_psr(state, score)
            patch = preprocess_patch(frame_in, search_box(box, config.search_scale), size)
            filt = train_update(filt, patch, label, config.lr)

        result.frames.append(FrameRecord(i, box, score, k1))
        if on_frame is not None:
            on_frame(i, frame_in, box, mask)
    if not result.frames:
        raise ValueError("track_sequence needs at least one frame")
    return result
