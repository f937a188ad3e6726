"""
How strong should the blend be?
===============================

Sweep fixed k1 values on a small distractor suite and compare them with the
adaptive estimate. The same sweep is available from the command line as
``depthattn ablate``.
"""

import numpy as np

from depthattn import synth
from depthattn.attention import DAConfig
from depthattn.evaluation import evaluate
from depthattn.tracker import track_sequence

scenes = [synth.render(synth.preset("distractor-same-texture", s)) for s in range(8)]


def mean_auc(da):
    aucs = []
    for sc in scenes:
        out = track_sequence(sc.float_frames(), sc.depths if da else None, sc.ground_truth[0], da_config=da)
        aucs.append(evaluate(out.boxes, sc.ground_truth).auc)
    return np.mean(aucs)


print(f"{'baseline':>10}  {mean_auc(None):.4f}")
for k1 in (1.0, 0.5, 0.2, 0.02):
    print(f"{k1:>10}  {mean_auc(DAConfig(k1=k1)):.4f}")
print(f"{'adaptive':>10}  {mean_auc(DAConfig()):.4f}")

# The depth maps carry 2% estimation noise, so a hard mask (k1 = 1) also
# erases parts of the target and is worse than no attention at all. A
# tiny blend (0.02) barely changes anything. On this suite a mid-range fixed
# value does best; the adaptive estimate never exceeds about 0.32 with a
# five-frame window, so it lands between 0.2 and the best fixed setting.
