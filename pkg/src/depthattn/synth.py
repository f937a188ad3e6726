"""Seeded synthetic tracking sequences with exact layered depth.

A scene is a static textured background plane, a textured rectangular
target and an optional occluder, each at its own depth. Smaller depth means
nearer; each pixel takes the intensity and depth of the nearest object.
The occluder can reuse the target's texture, in which case depth is the only
cue that separates the two.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
from scipy import ndimage

from .boxes import BoundingBox
from .sequences import format_groundtruth, write_depth, write_frame

PRESETS = ("translation", "occlusion", "distractor-same-texture", "out-of-view", "motion-blur")


@dataclass(frozen=True)
class Trajectory:
    """Centre path ``start + velocity * t + amplitude * sin(2 pi t / period)``."""

    start: tuple[float, float]
    velocity: tuple[float, float] = (0.0, 0.0)
    amplitude: tuple[float, float] = (0.0, 0.0)
    period: float = 100.0

    def center(self, t: float) -> tuple[float, float]:
        s = math.sin(2.0 * math.pi * t / self.period)
        return (
            self.start[0] + self.velocity[0] * t + self.amplitude[0] * s,
            self.start[1] + self.velocity[1] * t + self.amplitude[1] * s,
        )


@dataclass(frozen=True)
class Occluder:
    size: tuple[int, int]
    path: Trajectory
    entry_frame: int = 0
    clone_target_texture: bool = False


@dataclass(frozen=True)
class SynthSpec:
    width: int = 320
    height: int = 160
    frame_count: int = 100
    background_depth: float = 3000.0
    target_depth: float = 1500.0
    occluder_depth: float = 800.0
    target_size: tuple[int, int] = (32, 32)
    trajectory: Trajectory = field(default_factory=lambda: Trajectory((60.0, 80.0), (2.0, 0.0)))
    occluder: Occluder | None = None
    motion_blur: int | None = None
    out_of_view: tuple[int, int] | None = None
    # per-frame relative depth estimation noise (std as a fraction of depth)
    depth_noise: float = 0.0
    # target depth change per frame, in depth units
    target_depth_velocity: float = 0.0
    texture_seed: int = 0

    def target_depth_at(self, t: int) -> float:
        return self.target_depth + self.target_depth_velocity * t

    def target_box(self, t: int) -> BoundingBox:
        cx, cy = self.trajectory.center(t)
        return BoundingBox.from_center(cx, cy, *self.target_size)

    def validate(self) -> None:
        if self.width < 8 or self.height < 8 or self.frame_count < 1:
            raise ValueError("frame size must be >= 8 and frame_count >= 1")
        if min(self.target_size) < 1:
            raise ValueError("target size must be positive")
        if self.depth_noise < 0:
            raise ValueError("depth_noise must be nonnegative")
        depths = [self.background_depth, self.occluder_depth] + [
            self.target_depth_at(t) for t in (0, self.frame_count - 1)]
        if min(depths) <= 0 or max(depths) * (1 + 6 * self.depth_noise) > 65535:
            raise ValueError("depths must be positive and fit in 16 bits")
        scale = max(1.0, self.depth_noise * max(depths))
        layers = {
            "background": self.background_depth,
            "occluder": self.occluder_depth,
        }
        for t in (0, self.frame_count - 1):
            for name, d in layers.items():
                if abs(self.target_depth_at(t) - d) < 3 * scale:
                    raise ValueError(f"target depth at frame {t} is within 3x the MAD scale of the {name} depth")
        if abs(self.background_depth - self.occluder_depth) < 3 * scale:
            raise ValueError("occluder and background depths are not separable")
        for t in range(self.frame_count):
            if self.out_of_view is not None and self.out_of_view[0] <= t <= self.out_of_view[1]:
                continue
            cx, cy = self.trajectory.center(t)
            if not (0 <= cx < self.width and 0 <= cy < self.height):
                raise ValueError(f"target centre leaves the frame at frame {t} outside the out-of-view interval")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class Rendered:
    frames: list[np.ndarray]  # uint8, (H, W)
    depths: list[np.ndarray]  # float64 holding integer depth units
    ground_truth: list[BoundingBox]
    visible_fraction: list[float]
    out_of_view: list[int]

    @property
    def absent(self) -> list[int]:
        return [t for t, v in enumerate(self.visible_fraction) if v < 0.5]

    @property
    def occluded(self) -> list[int]:
        oov = set(self.out_of_view)
        return [t for t, v in enumerate(self.visible_fraction) if v < 1.0 and t not in oov]

    def float_frames(self) -> list[np.ndarray]:
        return [f / 255.0 for f in self.frames]


def value_noise(rng: np.random.Generator, shape: tuple[int, int], cell: int,
                lo: float, hi: float) -> np.ndarray:
    """Smooth random texture: a coarse random grid upsampled bilinearly plus
    a little per-pixel grain."""
    h, w = shape
    coarse = rng.random((h // cell + 2, w // cell + 2))
    smooth = ndimage.zoom(coarse, cell, order=1)[:h, :w]
    grain = rng.random((h, w))
    tex = 0.75 * smooth + 0.25 * grain
    return lo + (hi - lo) * tex


def _paste(canvas, depth, layer, layer_depth: float, box: BoundingBox):
    """Draw ``layer`` with its top-left at ``box`` (rounded) wherever it is
    nearer than what is already there. Returns the mask of pixels drawn."""
    h, w = canvas.shape
    x0, y0 = int(round(box.x)), int(round(box.y))
    lh, lw = layer.shape
    r0, r1 = max(y0, 0), min(y0 + lh, h)
    c0, c1 = max(x0, 0), min(x0 + lw, w)
    drawn = np.zeros((h, w), dtype=bool)
    if r1 <= r0 or c1 <= c0:
        return drawn
    nearer = layer_depth < depth[r0:r1, c0:c1]
    canvas[r0:r1, c0:c1] = np.where(nearer, layer[r0 - y0:r1 - y0, c0 - x0:c1 - x0], canvas[r0:r1, c0:c1])
    depth[r0:r1, c0:c1] = np.where(nearer, layer_depth, depth[r0:r1, c0:c1])
    drawn[r0:r1, c0:c1] = nearer
    return drawn


def render(spec: SynthSpec) -> Rendered:
    """Render every frame in memory; deterministic in ``spec``."""
    spec.validate()
    rng = np.random.default_rng(spec.texture_seed)
    H, W = spec.height, spec.width
    tw, th = spec.target_size
    background = value_noise(rng, (H, W), 16, 0.1, 0.55)
    target_tex = value_noise(rng, (th, tw), 6, 0.35, 1.0)
    occ = spec.occluder
    if occ is not None:
        ow, oh = occ.size
        if occ.clone_target_texture:
            reps = (-(-oh // th), -(-ow // tw))
            occ_tex = np.tile(target_tex, reps)[:oh, :ow]
        else:
            occ_tex = value_noise(rng, (oh, ow), 10, 0.0, 0.4)
    noise_rng = np.random.default_rng([spec.texture_seed, 1])

    frames, depths, gt, visible, oov = [], [], [], [], []
    for t in range(spec.frame_count):
        canvas = background.copy()
        depth = np.full((H, W), float(spec.background_depth))
        box = spec.target_box(t)
        target_pixels = _paste(canvas, depth, target_tex, spec.target_depth_at(t), box)
        if occ is not None and t >= occ.entry_frame:
            ocx, ocy = occ.path.center(t - occ.entry_frame)
            _paste(canvas, depth, occ_tex, float(spec.occluder_depth),
                   BoundingBox.from_center(ocx, ocy, *occ.size))
        still_visible = int((target_pixels & (depth == spec.target_depth_at(t))).sum())
        visible.append(still_visible / float(tw * th))
        cx, cy = box.center
        if not (0 <= cx < W and 0 <= cy < H):
            oov.append(t)

        if spec.motion_blur:
            vx, vy = spec.trajectory.velocity
            axis = 1 if abs(vx) >= abs(vy) else 0
            canvas = ndimage.uniform_filter1d(canvas, spec.motion_blur, axis=axis, mode="nearest")
        if spec.depth_noise > 0:
            depth = depth * (1.0 + spec.depth_noise * noise_rng.standard_normal((H, W)))
        frames.append(np.rint(np.clip(canvas, 0.0, 1.0) * 255.0).astype(np.uint8))
        depths.append(np.clip(np.rint(depth), 0, 65535))
        gt.append(box)
    return Rendered(frames, depths, gt, visible, oov)


def metadata(spec: SynthSpec, rendered: Rendered, preset: str | None = None) -> dict:
    return {
        "preset": preset,
        "spec": spec.to_dict(),
        "absent": rendered.absent,
        "occluded": rendered.occluded,
        "out_of_view": rendered.out_of_view,
        "visible_fraction": rendered.visible_fraction,
    }


def synth_sequence(spec: SynthSpec, out_dir, preset: str | None = None) -> Rendered:
    """Render ``spec`` and write it as a sequence directory."""
    rendered = render(spec)
    out = Path(out_dir)
    (out / "img").mkdir(parents=True, exist_ok=True)
    (out / "depth").mkdir(exist_ok=True)
    for t, (frame, depth) in enumerate(zip(rendered.frames, rendered.depths), start=1):
        (out / "img" / f"{t:08d}.pgm").write_bytes(write_frame(frame))
        (out / "depth" / f"{t:08d}.pgm").write_bytes(write_depth(depth))
    (out / "groundtruth_rect.txt").write_text(format_groundtruth(rendered.ground_truth))
    (out / "spec.json").write_text(json.dumps(metadata(spec, rendered, preset), indent=1, sort_keys=True) + "\n")
    return rendered


def preset(name: str, seed: int = 0) -> SynthSpec:
    """Build the named benchmark preset; ``seed`` varies textures and layout."""
    if name not in PRESETS:
        raise ValueError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    rng = np.random.default_rng([seed, PRESETS.index(name)])
    y0 = float(rng.integers(60, 101))
    base = dict(texture_seed=int(seed))

    if name == "translation":
        return SynthSpec(trajectory=Trajectory((float(rng.integers(40, 61)), y0), (2.0, 0.0)), **base)

    if name in ("occlusion", "distractor-same-texture"):
        # an occluder crosses in front of the target against its motion; the
        # distractor variant clones the target texture and covers it only
        # partially (vertical offset 6..12 px), the plain variant is larger
        # and passes nearly head-on
        x0 = float(rng.integers(70, 111))
        vx = 1.0
        entry = int(rng.integers(8, 16))
        meet = int(rng.integers(25, 36))  # frame where the centres align horizontally
        speed = float(rng.integers(1, 4))
        distractor = name == "distractor-same-texture"
        dy = float(rng.integers(6, 13) if distractor else rng.integers(0, 5))
        dy *= 1.0 if rng.random() < 0.5 else -1.0
        ox0 = x0 + vx * meet + speed * (meet - entry)
        return SynthSpec(
            trajectory=Trajectory((x0, y0), (vx, 0.0)),
            occluder=Occluder(
                size=(32, 32) if distractor else (36, 48),
                path=Trajectory((ox0, y0 + dy), (-speed, 0.0)),
                entry_frame=entry,
                clone_target_texture=distractor,
            ),
            depth_noise=0.02,
            **base,
        )

    if name == "out-of-view":
        traj = Trajectory((200.0, y0), (0.0, 0.0), (150.0, 0.0), 100.0)
        out = [t for t in range(100) if not 0 <= traj.center(t)[0] < 320]
        return SynthSpec(trajectory=traj, out_of_view=(min(out), max(out)), **base)

    # motion-blur
    return SynthSpec(
        trajectory=Trajectory((40.0, y0), (2.5, 0.0), (0.0, 12.0), 40.0),
        motion_blur=9,
        **base,
    )
