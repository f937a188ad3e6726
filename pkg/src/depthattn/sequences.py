"""Sequence directories, ground truth files, PNM rasters and result JSON.

Directory layout::

    <seq>/img/00000001.pgm      8-bit frames (.pgm, .ppm or .png)
    <seq>/depth/00000001.pgm    16-bit depth, optional
    <seq>/groundtruth_rect.txt  OTB boxes, 1-based
    <seq>/spec.json             synthetic sequences only
"""
from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

import jsonschema
import numpy as np

from .boxes import BoundingBox, as_frame
from .tracker import FrameRecord, TrackResult

FRAME_EXTENSIONS = (".pgm", ".ppm", ".png")


class FormatError(ValueError):
    pass


class GroundTruthError(FormatError):
    def __init__(self, lineno: int, line: str, reason: str):
        super().__init__(f"line {lineno}: {reason}: {line!r}")
        self.lineno = lineno


class SchemaError(FormatError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


class SequenceError(ValueError):
    pass


# -- ground truth ----------------------------------------------------------

def parse_groundtruth(text: str) -> list[BoundingBox]:
    """Parse OTB ``groundtruth_rect.txt`` content into 0-based boxes."""
    boxes = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        fields = [f for f in re.split(r"[,\s]+", line.strip()) if f]
        if len(fields) != 4:
            raise GroundTruthError(lineno, line, f"expected 4 fields, found {len(fields)}")
        try:
            x, y, w, h = (float(f) for f in fields)
        except ValueError:
            raise GroundTruthError(lineno, line, "non-numeric field") from None
        try:
            boxes.append(BoundingBox(x - 1.0, y - 1.0, w, h))
        except ValueError as exc:
            raise GroundTruthError(lineno, line, str(exc)) from None
    return boxes


def format_groundtruth(boxes) -> str:
    return "".join(
        f"{b.x + 1.0!r},{b.y + 1.0!r},{b.w!r},{b.h!r}\n" for b in boxes
    )


# -- PNM -------------------------------------------------------------------

_TOKEN = re.compile(rb"\s*(?:#[^\n]*\n\s*)*(\S+)")


def read_pnm(data: bytes) -> tuple[np.ndarray, int]:
    """Decode a binary PGM (P5) or PPM (P6) image.

    Returns the raw integer samples, shape ``(H, W)`` or ``(H, W, 3)``, and
    the maxval.
    """
    pos = 0
    tokens = []
    for _ in range(4):
        m = _TOKEN.match(data, pos)
        if m is None:
            raise FormatError("truncated PNM header")
        tokens.append(m.group(1))
        pos = m.end()
    magic = tokens[0]
    if magic not in (b"P5", b"P6"):
        raise FormatError(f"bad magic {magic!r}, expected P5 or P6")
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError:
        raise FormatError("non-integer PNM header field") from None
    if width < 1 or height < 1 or not 0 < maxval < 65536:
        raise FormatError(f"bad PNM header {width}x{height} maxval {maxval}")
    if pos >= len(data) or not data[pos:pos + 1].isspace():
        raise FormatError("missing whitespace after PNM header")
    pos += 1
    channels = 1 if magic == b"P5" else 3
    dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
    count = width * height * channels
    need = count * dtype.itemsize
    if len(data) - pos < need:
        raise FormatError(f"truncated PNM data: need {need} bytes, have {len(data) - pos}")
    samples = np.frombuffer(data, dtype=dtype, count=count, offset=pos)
    shape = (height, width) if channels == 1 else (height, width, 3)
    return samples.reshape(shape).astype(np.int64), maxval


def write_pnm(samples, maxval: int) -> bytes:
    arr = np.asarray(samples)
    if arr.ndim == 2:
        magic = b"P5"
    elif arr.ndim == 3 and arr.shape[2] == 3:
        magic = b"P6"
    else:
        raise ValueError(f"cannot write array of shape {arr.shape} as PNM")
    if arr.min(initial=0) < 0 or arr.max(initial=0) > maxval:
        raise ValueError(f"samples outside [0, {maxval}]")
    dtype = ">u2" if maxval > 255 else "u1"
    header = b"%s\n%d %d\n%d\n" % (magic, arr.shape[1], arr.shape[0], maxval)
    return header + np.ascontiguousarray(arr, dtype=dtype).tobytes()


def load_depth(data: bytes) -> np.ndarray:
    """Decode a 16-bit P5 depth raster; values are the raw samples."""
    samples, maxval = read_pnm(data)
    if samples.ndim != 2:
        raise FormatError("depth must be a single-channel P5 image")
    if maxval != 65535:
        raise FormatError(f"bad maxval {maxval}: depth PGMs must use 65535")
    return samples.astype(np.float64)


def write_depth(depth) -> bytes:
    """Encode depth as 16-bit P5; values are rounded and must fit in 0..65535."""
    arr = np.rint(np.asarray(depth, dtype=np.float64))
    if arr.ndim != 2:
        raise ValueError("depth must be 2-D")
    return write_pnm(arr.astype(np.int64), 65535)


def read_frame(path) -> np.ndarray:
    path = Path(path)
    if path.suffix.lower() == ".png":
        from PIL import Image  # optional dependency

        with Image.open(path) as im:
            arr = np.asarray(im.convert("L" if im.mode in ("L", "I;16", "I") else "RGB"))
        return as_frame(arr)
    samples, maxval = read_pnm(path.read_bytes())
    return as_frame(samples / float(maxval))


def write_frame(frame) -> bytes:
    """Encode a [0, 1] frame as 8-bit PGM/PPM."""
    frame = as_frame(frame)
    if frame.ndim == 3 and frame.shape[2] == 1:
        frame = frame[:, :, 0]
    return write_pnm(np.rint(frame * 255.0).astype(np.int64), 255)


def read_depth(path) -> np.ndarray:
    return load_depth(Path(path).read_bytes())


# -- sequence directories ----------------------------------------------------

def _natural_key(path: Path):
    return [int(t) if t.isdigit() else t for t in re.split(r"(\d+)", path.name)]


def _list_images(directory: Path) -> list[Path]:
    files = [p for p in directory.iterdir() if p.suffix.lower() in FRAME_EXTENSIONS]
    return sorted(files, key=_natural_key)


@dataclass
class Sequence:
    id: str
    frames: list[Path]
    ground_truth: list[BoundingBox]
    depths: list[Path] | None = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        n = len(self.frames)
        if n < 1:
            raise SequenceError(f"sequence {self.id!r} has no frames")
        if len(self.ground_truth) != n:
            raise SequenceError(
                f"count mismatch in {self.id!r}: {n} frames but {len(self.ground_truth)} ground-truth boxes")
        if self.depths is not None and len(self.depths) != n:
            raise SequenceError(
                f"count mismatch in {self.id!r}: {n} frames but {len(self.depths)} depth maps")

    def __len__(self) -> int:
        return len(self.frames)

    def iter_frames(self):
        return (read_frame(p) for p in self.frames)

    def iter_depths(self):
        if self.depths is None:
            return None
        return (read_depth(p) for p in self.depths)

    @property
    def absent(self) -> list[int]:
        """Frames flagged as target-absent by the synthetic generator."""
        return list(self.metadata.get("absent", []))


def load_sequence(directory) -> Sequence:
    directory = Path(directory)
    gt_path = directory / "groundtruth_rect.txt"
    if not gt_path.is_file():
        raise SequenceError(f"missing ground truth: {gt_path}")
    img_dir = directory / "img"
    if not img_dir.is_dir():
        raise SequenceError(f"missing frame directory: {img_dir}")
    depth_dir = directory / "depth"
    depths = _list_images(depth_dir) if depth_dir.is_dir() else None
    meta_path = directory / "spec.json"
    metadata = json.loads(meta_path.read_text()) if meta_path.is_file() else {}
    return Sequence(
        id=directory.name,
        frames=_list_images(img_dir),
        ground_truth=parse_groundtruth(gt_path.read_text()),
        depths=depths,
        metadata=metadata,
    )


# -- track results ---------------------------------------------------------

_NUMBER = {"type": "number"}
RESULT_SCHEMA = {
    "type": "object",
    "required": ["schema_version", "sequence_id", "mode", "config", "frames"],
    "properties": {
        "schema_version": {"const": 1},
        "sequence_id": {"type": "string"},
        "mode": {"enum": ["baseline", "depth-attention"]},
        "config": {"type": "object"},
        "frames": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["i", "box", "psr", "k1"],
                "properties": {
                    "i": {"type": "integer", "minimum": 0},
                    "box": {"type": "array", "items": _NUMBER, "minItems": 4, "maxItems": 4},
                    "psr": _NUMBER,
                    "k1": {"type": "number", "minimum": 0, "maximum": 1},
                },
            },
        },
    },
}


def result_to_dict(result: TrackResult) -> dict:
    return {
        "schema_version": 1,
        "sequence_id": result.sequence_id,
        "mode": result.mode,
        "config": result.config,
        "frames": [
            {"i": r.i, "box": r.box.to_list(), "psr": float(r.psr), "k1": float(r.k1)}
            for r in result.frames
        ],
    }


def write_result(result: TrackResult) -> bytes:
    return (json.dumps(result_to_dict(result), indent=1, sort_keys=True, allow_nan=False) + "\n").encode()


def _json_path(error: jsonschema.ValidationError) -> str:
    path = error.json_path
    if error.validator == "required":
        missing = re.match(r"'([^']*)'", error.message)
        if missing:
            path += "." + missing.group(1)
    return path


def read_result(data: bytes | str) -> TrackResult:
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise SchemaError("$", f"invalid JSON: {exc}") from None
    error = jsonschema.exceptions.best_match(jsonschema.Draft202012Validator(RESULT_SCHEMA).iter_errors(doc))
    if error is not None:
        raise SchemaError(_json_path(error), error.message)
    records = []
    for n, rec in enumerate(doc["frames"]):
        path = f"$.frames[{n}]"
        if records and rec["i"] <= records[-1].i:
            raise SchemaError(f"{path}.i", "frame indices must be strictly increasing")
        if not all(math.isfinite(v) for v in rec["box"]) or not math.isfinite(rec["psr"]):
            raise SchemaError(path, "non-finite value")
        try:
            box = BoundingBox(*rec["box"])
        except ValueError as exc:
            raise SchemaError(f"{path}.box", str(exc)) from None
        records.append(FrameRecord(rec["i"], box, float(rec["psr"]), float(rec["k1"])))
    return TrackResult(doc["sequence_id"], doc["mode"], doc["config"], records)
