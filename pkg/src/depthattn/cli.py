"""Command-line entry point: ``depthattn {synth,track,eval,ablate,stats}``.

Exit status is 0 on success, 2 on usage errors and 1 on runtime errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import synth
from .attention import DAConfig
from .boxes import BoundingBox, rasterize
from .evaluation import displacements, evaluate, histogram, psr_series
from .sequences import load_sequence, read_result, write_pnm, write_result
from .tracker import TrackerConfig, track_sequence


@dataclass(frozen=True)
class RunConfig:
    mode: str = "baseline"  # "baseline" or "da"
    th: float = 1.5
    k1: float | str = "adaptive"
    psr_window: int = 5
    update_interval: int = 60
    lr: float = 0.125
    search_scale: float = 2.0
    patch_size: int = 64
    seed: int = 0

    def tracker_config(self) -> TrackerConfig:
        return TrackerConfig(patch_size=self.patch_size, search_scale=self.search_scale, lr=self.lr)

    def da_config(self) -> DAConfig | None:
        if self.mode != "da":
            return None
        return DAConfig(th=self.th, psr_window=self.psr_window,
                        ref_update_interval=self.update_interval, k1=self.k1)


def _dump(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=True, allow_nan=False) + "\n"


def parse_k1(text: str) -> float | str:
    if text == "adaptive":
        return text
    value = text[len("fixed:"):] if text.startswith("fixed:") else text
    try:
        k1 = float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'adaptive' or 'fixed:<value>', got {text!r}") from None
    if not 0.0 <= k1 <= 1.0:
        raise argparse.ArgumentTypeError("fixed k1 must lie in [0, 1]")
    return k1


def parse_grid(text: str) -> list[float]:
    return [parse_k1(v.strip()) for v in text.split(",") if v.strip()]


# -- track -------------------------------------------------------------------

def _overlay(frame: np.ndarray, box: BoundingBox, mask: np.ndarray | None) -> np.ndarray:
    gray = frame.mean(axis=2) if frame.ndim == 3 else frame
    rgb = np.repeat(np.rint(gray * 255).astype(np.int64)[:, :, None], 3, axis=2)
    h, w = gray.shape
    try:
        rows, cols = rasterize(box, w, h)
    except ValueError:
        rows = cols = None
    if rows is not None:
        green = np.array([0, 255, 0])
        rgb[rows.start, cols] = green
        rgb[rows.stop - 1, cols] = green
        rgb[rows, cols.start] = green
        rgb[rows, cols.stop - 1] = green
    if mask is None:
        return rgb
    panel = np.repeat((mask.astype(np.int64) * 255)[:, :, None], 3, axis=2)
    return np.concatenate([rgb, panel], axis=1)


def run_track(seq_dir, config: RunConfig, overlays=None):
    seq = load_sequence(seq_dir)
    da = config.da_config()
    if da is not None and seq.depths is None:
        raise RuntimeError(f"depth maps required for mode 'da' but {Path(seq_dir) / 'depth'} is missing")
    on_frame = None
    if overlays is not None:
        out_dir = Path(overlays)
        out_dir.mkdir(parents=True, exist_ok=True)

        def write_overlay(i, frame, box, mask):
            (out_dir / f"{i + 1:08d}.ppm").write_bytes(write_pnm(_overlay(frame, box, mask), 255))
        on_frame = write_overlay

    result = track_sequence(
        seq.iter_frames(), seq.iter_depths() if da is not None else None, seq.ground_truth[0],
        config.tracker_config(), da, sequence_id=seq.id, on_frame=on_frame,
    )
    result.config = {"run": asdict(config), **result.config}
    return result


def cmd_track(args) -> int:
    config = RunConfig(
        mode=args.mode, th=args.th, k1=args.k1, psr_window=args.psr_window,
        update_interval=args.update_interval, lr=args.lr, search_scale=args.search_scale,
        patch_size=args.patch_size, seed=args.seed,
    )
    result = run_track(args.seq, config, args.overlays)
    Path(args.out).write_bytes(write_result(result))
    return 0


# -- eval --------------------------------------------------------------------

def evaluate_result(result, seq, skip_absent: bool = False):
    pred, gt = result.boxes, seq.ground_truth
    if len(pred) != len(gt):
        raise RuntimeError(f"length mismatch: {len(pred)} result frames vs {len(gt)} ground-truth boxes")
    if skip_absent:
        absent = set(seq.absent)
        keep = [i for i in range(len(gt)) if i not in absent]
        pred, gt = [pred[i] for i in keep], [gt[i] for i in keep]
    return evaluate(pred, gt)


def cmd_eval(args) -> int:
    result = read_result(Path(args.results).read_bytes())
    report = evaluate_result(result, load_sequence(args.seq), args.skip_absent)
    text = _dump(report.to_dict())
    if args.out:
        Path(args.out).write_text(text)
    sys.stdout.write(text)
    return 0


# -- ablate ------------------------------------------------------------------

def _cell(job):
    seq_dir, config = job
    seq = load_sequence(seq_dir)
    report = evaluate_result(run_track(seq_dir, config), seq)
    return seq.id, report


def _label(k1) -> str:
    return k1 if isinstance(k1, str) else repr(float(k1))


def cmd_ablate(args) -> int:
    base = RunConfig(mode="da", th=args.th, psr_window=args.psr_window,
                     update_interval=args.update_interval, seed=args.seed)
    seq_dirs = sorted(args.seq, key=str)
    settings = [("baseline", RunConfig(mode="baseline", seed=args.seed))]
    settings += [(_label(k1), RunConfig(**{**asdict(base), "k1": k1})) for k1 in args.k1_grid]
    if not any(label == "adaptive" for label, _ in settings):
        settings.append(("adaptive", base))
    jobs = [(d, cfg) for _, cfg in settings for d in seq_dirs]
    for d in seq_dirs:
        if load_sequence(d).depths is None:
            raise RuntimeError(f"depth maps required: {d} has no depth/ directory")
    if args.workers > 1:
        with ProcessPoolExecutor(args.workers) as pool:
            outputs = list(pool.map(_cell, jobs))
    else:
        outputs = [_cell(j) for j in jobs]

    rows = {}
    for n, (label, cfg) in enumerate(settings):
        cells = dict(sorted(outputs[n * len(seq_dirs):(n + 1) * len(seq_dirs)]))
        rows[label] = {
            "k1": cfg.k1 if cfg.mode == "da" else None,
            "mode": cfg.mode,
            "mean_auc": float(np.mean([r.auc for r in cells.values()])),
            "mean_precision": float(np.mean([r.precision_at_20 for r in cells.values()])),
            "mean_normalized_precision": float(np.mean([r.normalized_precision for r in cells.values()])),
            "auc": {k: r.auc for k, r in cells.items()},
        }
    table = {
        "th": args.th,
        "sequences": [Path(d).name for d in seq_dirs],
        "baseline": rows.pop("baseline"),
        "rows": [rows[label] for label, _ in settings if label in rows],
    }
    Path(args.out).write_text(_dump(table))
    lines = [f"{'k1':>10}  {'AUC':>7}  {'P@20':>7}  {'NP':>7}"]
    for row in [table["baseline"]] + table["rows"]:
        name = "baseline" if row["mode"] == "baseline" else _label(row["k1"])
        lines.append(f"{name:>10}  {row['mean_auc']:7.4f}  {row['mean_precision']:7.4f}"
                     f"  {row['mean_normalized_precision']:7.4f}")
    print("\n".join(lines))
    return 0


# -- stats / synth -------------------------------------------------------------

def cmd_stats(args) -> int:
    if args.kind == "displacement":
        values = np.concatenate([
            displacements(load_sequence(d).ground_truth, args.window) for d in sorted(args.seq, key=str)])
        hist = histogram(values, args.window)
        Path(args.out).write_text(_dump(hist.to_dict()))
        print(f"{hist.samples} samples, fraction below 1.0: {hist.fraction_below_one:.4f}")
        return 0
    result = read_result(Path(args.results).read_bytes())
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["frame", "psr"])
    writer.writerows((i, repr(v)) for i, v in psr_series(result))
    Path(args.out).write_text(buf.getvalue())
    return 0


def cmd_synth(args) -> int:
    spec = synth.preset(args.preset, args.seed)
    synth.synth_sequence(spec, args.out, preset=args.preset)
    sys.stdout.write(_dump({"preset": args.preset, "seed": args.seed, "spec": spec.to_dict()}))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="depthattn", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="write a synthetic sequence")
    p.add_argument("--preset", required=True, choices=synth.PRESETS)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    def da_flags(p):
        p.add_argument("--th", type=float, default=1.5)
        p.add_argument("--psr-window", type=int, default=5)
        p.add_argument("--update-interval", type=int, default=60)
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("track", help="run the tracker on a sequence")
    p.add_argument("--seq", required=True)
    p.add_argument("--mode", choices=("baseline", "da"), default="baseline")
    p.add_argument("--k1", type=parse_k1, default="adaptive", help="adaptive | fixed:<value>")
    p.add_argument("--lr", type=float, default=0.125)
    p.add_argument("--search-scale", type=float, default=2.0)
    p.add_argument("--patch-size", type=int, default=64)
    p.add_argument("--out", required=True)
    p.add_argument("--overlays", help="directory for per-frame PPM overlays")
    da_flags(p)
    p.set_defaults(func=cmd_track)

    p = sub.add_parser("eval", help="score a result file against ground truth")
    p.add_argument("--results", required=True)
    p.add_argument("--seq", required=True)
    p.add_argument("--skip-absent", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("ablate", help="sweep fixed k1 values plus adaptive k1")
    p.add_argument("--seq", required=True, nargs="+")
    p.add_argument("--k1-grid", type=parse_grid,
                   default=[1.0, 0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.2, 0.1, 0.0, 0.02])
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", required=True)
    da_flags(p)
    p.set_defaults(func=cmd_ablate)

    p = sub.add_parser("stats", help="displacement histogram or PSR series")
    stats = p.add_subparsers(dest="kind", required=True)
    q = stats.add_parser("displacement")
    q.add_argument("--seq", required=True, nargs="+")
    q.add_argument("--window", type=int, default=5)
    q.add_argument("--out", required=True)
    q.set_defaults(func=cmd_stats)
    q = stats.add_parser("psr")
    q.add_argument("--results", required=True)
    q.add_argument("--out", required=True)
    q.set_defaults(func=cmd_stats)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ValueError, RuntimeError) as exc:
        print(f"depthattn {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
