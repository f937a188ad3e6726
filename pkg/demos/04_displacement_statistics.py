"""
How far do targets move?
========================

Normalised Manhattan displacement of the ground-truth box over five frames.
Values below 1 mean the target stays within about one box size, which is
what makes reusing the previous box for depth statistics reasonable.
"""

import numpy as np

from depthattn import synth
from depthattn.evaluation import displacements, histogram

values = []
for name in synth.PRESETS:
    for seed in range(3):
        d = displacements(synth.render(synth.preset(name, seed)).ground_truth, window=5)
        values.append(d)
        if seed == 0:
            print(f"{name:>24}: median {np.median(d):.3f}, max {d.max():.3f}")

hist = histogram(np.concatenate(values), window=5)
print("samples", hist.samples, "fraction below 1.0:", round(hist.fraction_below_one, 3))

# text histogram, one row per 0.1 bin up to the last occupied one
last = max(i for i, c in enumerate(hist.counts) if c)
scale = 60 / max(hist.counts)
for lo, c in zip(hist.edges + [float("inf")], hist.counts[:last + 1]):
    print(f"{lo:4.1f} {'#' * int(round(c * scale))}")
