"""
Depth attention, step by step
=============================

Render one frame of a synthetic scene, compute the robust depth z-score
against the target box, threshold it and blend the frame.
"""

import numpy as np

from depthattn import synth
from depthattn.attention import (PsrWindow, estimate_k1, modulate, robust_stats,
                                 threshold_mask, z_kernel)

# A target at depth 1500 in front of a background plane at 3000, with a
# same-texture distractor at 800 crossing in front of it.
spec = synth.preset("distractor-same-texture", seed=0)
scene = synth.render(spec)
t = 5  # before the distractor enters
frame = scene.float_frames()[t]
depth = scene.depths[t]
box = scene.ground_truth[t]
print("frame", t, "target box", box.to_list())

# Reference statistics come from the depth inside the box.
ref = robust_stats(depth, box, t)
print(f"median depth {ref.median:.0f}, MAD {ref.mad:.1f}")

# Per-pixel z-score, then keep everything within 1.5 MAD of the median.
z = z_kernel(depth, ref)
mask = threshold_mask(z, 1.5)
print(f"mask keeps {mask.mean():.1%} of the frame")

target = np.abs(depth - spec.target_depth) < 4 * spec.depth_noise * spec.target_depth
print(f"  target pixels kept:     {mask[target].mean():.1%}")
print(f"  non-target pixels kept: {mask[~target].mean():.1%}")
# With 2% depth noise, 1.5 MAD is roughly one standard deviation, so only
# about 70% of the target survives. That is why the frame is blended rather
# than cut out.

# k1 comes from how typical the latest tracking confidence (PSR) is within
# the last five frames. A PSR in line with its window gets close to the
# ceiling (about 0.32 for five values); an outlier gets far less.
for values in [(12.0, 12.5, 11.8, 12.2, 12.1), (12.0, 12.5, 11.8, 12.2, 5.0), (8.0,) * 5]:
    print("PSR window", values, "-> k1 =", round(estimate_k1(PsrWindow(5, values)), 4))

# Blend: masked-in pixels are untouched, the rest are dimmed by k1.
for k1 in (0.0, 0.2, 1.0):
    out = modulate(frame, mask, k1)
    outside = mask == 0
    print(f"k1={k1:.1f}: mean intensity outside the mask "
          f"{frame[outside].mean():.3f} -> {out[outside].mean():.3f}")

# Later on the distractor sits over the box and the reference statistics
# pick up its depth instead. Depth attention trusts the previous box, so it
# cannot recover a target it has already lost.
t = 30
ref = robust_stats(scene.depths[t], scene.ground_truth[t], t)
print(f"frame {t}: median depth inside the box {ref.median:.0f} (distractor at {spec.occluder_depth:.0f})")
