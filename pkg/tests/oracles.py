"""Naive reference implementations used as independent oracles.

Plain Python loops over pixels and frames; no shared code with the package.
"""
import math


def median(values):
    s = sorted(values)
    n = len(s)
    mid = n // 2
    return s[mid] if n % 2 else (s[mid - 1] + s[mid]) / 2.0


def z_kernel(depth, med, mad):
    rows, cols = len(depth), len(depth[0])
    scale = max(mad, 1e-6)
    return [[abs(depth[r][c] - med) / scale for c in range(cols)] for r in range(rows)]


def mask(z, th):
    return [[1 if v <= th else 0 for v in row] for row in z]


def psr(score, radius):
    rows, cols = len(score), len(score[0])
    best, pr, pc = -math.inf, 0, 0
    for r in range(rows):
        for c in range(cols):
            if score[r][c] > best:
                best, pr, pc = score[r][c], r, c
    side = [score[r][c] for r in range(rows) for c in range(cols)
            if abs(r - pr) > radius or abs(c - pc) > radius]
    mean = sum(side) / len(side)
    var = sum((v - mean) ** 2 for v in side) / len(side)
    return (best - mean) / max(math.sqrt(var), 1e-6)


def iou(a, b):
    ax, ay, aw, ah = a
    bx, by, bw, bh = b
    iw = max(0.0, min(ax + aw, bx + bw) - max(ax, bx))
    ih = max(0.0, min(ay + ah, by + bh) - max(ay, by))
    inter = iw * ih
    union = aw * ah + bw * bh - inter
    return inter / union if union > 0 else 0.0


def success(pred, gt):
    ious = [iou(p, g) for p, g in zip(pred, gt)]
    curve = []
    for k in range(21):
        t = k / 20
        curve.append(sum(1 for v in ious if v > t) / len(ious))
    return curve, sum(curve) / len(curve)


def center(b):
    return (b[0] + b[2] / 2.0, b[1] + b[3] / 2.0)


def precision(pred, gt):
    hits = 0
    norm = []
    for p, g in zip(pred, gt):
        (px, py), (gx, gy) = center(p), center(g)
        if math.hypot(px - gx, py - gy) <= 20:
            hits += 1
        norm.append(math.hypot((px - gx) / g[2], (py - gy) / g[3]))
    curve = [sum(1 for d in norm if d <= k / 200) / len(norm) for k in range(101)]
    return hits / len(pred), sum(curve) / len(curve)


def overlap(pred, gt):
    ious = [iou(p, g) for p, g in zip(pred, gt)]
    n = len(ious)
    return (sum(ious) / n, sum(1 for v in ious if v > 0.5) / n, sum(1 for v in ious if v > 0.75) / n)


def manhattan(gt, window):
    out = []
    for t in range(window, len(gt)):
        (x0, y0), (x1, y1) = center(gt[t - window]), center(gt[t])
        out.append(abs(x1 - x0) / gt[t][2] + abs(y1 - y0) / gt[t][3])
    return out
