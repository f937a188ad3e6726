import hashlib
import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from depthattn import synth
from depthattn.attention import robust_stats, threshold_mask, z_kernel
from depthattn.boxes import rasterize
from depthattn.sequences import load_sequence
from depthattn.synth import Occluder, SynthSpec, Trajectory


def _tree_digest(root):
    h = hashlib.sha256()
    for p in sorted(root.rglob("*")):
        if p.is_file():
            h.update(str(p.relative_to(root)).encode())
            h.update(p.read_bytes())
    return h.hexdigest()


def test_constant_velocity_ground_truth(tmp_path):
    spec = synth.preset("translation", 3)
    synth.synth_sequence(spec, tmp_path / "s")
    seq = load_sequence(tmp_path / "s")
    (sx, sy), (vx, vy) = spec.trajectory.start, spec.trajectory.velocity
    for t, box in enumerate(seq.ground_truth):
        assert box.center == (sx + t * vx, sy + t * vy)
    assert len(seq) == spec.frame_count == len(seq.depths)


def test_occluder_depth_layering():
    spec = SynthSpec(
        frame_count=30,
        trajectory=Trajectory((100.0, 80.0), (0.0, 0.0)),
        occluder=Occluder((20, 20), Trajectory((140.0, 80.0), (-2.0, 0.0)), entry_frame=0),
    )
    r = synth.render(spec)
    t = 20  # occluder centre at x=100, on top of the target
    rows, cols = rasterize(r.ground_truth[t], spec.width, spec.height)
    region = r.depths[t][rows, cols]
    assert np.all(region[6:26, 6:26] == spec.occluder_depth)
    assert np.all(region[:5] == spec.target_depth)
    assert r.visible_fraction[t] < 1.0 and t in r.occluded


@pytest.mark.parametrize("name", synth.PRESETS)
def test_presets_are_deterministic(tmp_path, name):
    synth.synth_sequence(synth.preset(name, 42), tmp_path / "a")
    synth.synth_sequence(synth.preset(name, 42), tmp_path / "b")
    assert _tree_digest(tmp_path / "a") == _tree_digest(tmp_path / "b")
    assert len(load_sequence(tmp_path / "a")) == 100


def test_distractor_clones_target_texture():
    spec = synth.preset("distractor-same-texture", 0)
    assert spec.occluder.clone_target_texture and spec.occluder.size == spec.target_size
    assert spec.occluder_depth != spec.target_depth
    assert not synth.preset("occlusion", 0).occluder.clone_target_texture


def test_out_of_view_flags(tmp_path):
    spec = synth.preset("out-of-view", 1)
    synth.synth_sequence(spec, tmp_path / "s")
    meta = json.loads((tmp_path / "s" / "spec.json").read_text())
    lo, hi = spec.out_of_view
    assert meta["out_of_view"] and all(lo <= t <= hi for t in meta["out_of_view"])
    assert set(meta["out_of_view"]) <= set(meta["absent"])


def test_spec_validation():
    with pytest.raises(ValueError, match="leaves the frame"):
        SynthSpec(trajectory=Trajectory((300.0, 80.0), (2.0, 0.0))).validate()
    with pytest.raises(ValueError, match="MAD scale"):
        SynthSpec(target_depth=3001.0).validate()
    with pytest.raises(ValueError, match="unknown preset"):
        synth.preset("nope")


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from(["translation", "motion-blur"]), st.integers(0, 99))
def test_depth_separates_target_from_background(seed, name, t):
    spec = synth.preset(name, seed)
    r = synth.render(spec)
    box = r.ground_truth[t]
    mask = threshold_mask(z_kernel(r.depths[t], robust_stats(r.depths[t], box, t)), 1.5)
    target = r.depths[t] == spec.target_depth_at(t)
    assert mask[target].mean() >= 0.99
    assert 1 - mask[~target].mean() >= 0.99
