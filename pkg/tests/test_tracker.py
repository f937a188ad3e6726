import math

import numpy as np
import pytest

import oracles
from depthattn import synth
from depthattn.attention import DAConfig
from depthattn.boxes import BoundingBox
from depthattn.evaluation import overlaps
from depthattn.tracker import (crop_resample, gaussian_label, locate,
                               preprocess_patch, psr, respond, track_sequence, train_update)


def test_gaussian_label():
    g = gaussian_label(64, 64, 4.0)
    assert g[32, 32] == 1.0 and g.max() == 1.0
    assert g[32, 36] == pytest.approx(math.exp(-0.5), abs=1e-15)
    odd = gaussian_label(31, 21, 3.0)
    assert np.array_equal(odd, odd[:, ::-1])
    assert np.array_equal(odd, odd[::-1, :])


def test_preprocess_constant_patch_is_zero():
    out = preprocess_patch(np.full((40, 40), 0.5), BoundingBox(5, 5, 20, 20), (32, 32))
    assert np.all(out == 0.0)


def test_preprocess_normalisation_and_window():
    frame = np.random.default_rng(0).random((50, 50))
    out = preprocess_patch(frame, BoundingBox(5, 5, 30, 30), (32, 32))
    window = np.outer(np.hanning(32), np.hanning(32))
    inner = out[1:-1, 1:-1] / window[1:-1, 1:-1]
    raw = np.log1p(crop_resample(frame, BoundingBox(5, 5, 30, 30), (32, 32)))
    norm = (raw - raw.mean()) / raw.std()
    assert abs(norm.mean()) < 1e-12 and abs(norm.var() - 1) < 1e-12
    assert np.allclose(inner, norm[1:-1, 1:-1])
    assert np.all(out[0] == 0) and np.all(out[:, -1] == 0)


def test_preprocess_replicates_edges_outside_frame():
    frame = np.zeros((10, 10))
    frame[:, 0] = 1.0
    patch = crop_resample(frame, BoundingBox(-5, 0, 10, 10), (10, 10))
    assert np.all(patch[:, :5] == 1.0)


def _patch(seed=0, n=64):
    return np.random.default_rng(seed).standard_normal((n, n))


def test_train_update_rules():
    label = gaussian_label(64, 64, 4.0)
    p = _patch()
    f = train_update(None, p, label, 0.3)
    F, G = np.fft.fft2(p), np.fft.fft2(label)
    assert np.array_equal(f.numerator, G * np.conj(F))
    assert np.array_equal(f.denominator, F * np.conj(F) + 1e-4)
    same = train_update(f, _patch(1), label, 0.0)
    assert np.array_equal(same.numerator, f.numerator) and np.array_equal(same.denominator, f.denominator)
    with pytest.raises(ValueError):
        train_update(f, _patch(1, 32), gaussian_label(32, 32, 2.0), 0.1)


def test_update_is_convex_blend():
    label = gaussian_label(64, 64, 4.0)
    f0 = train_update(None, _patch(0), label)
    f1 = train_update(None, _patch(1), label)
    f = train_update(f0, _patch(1), label, 0.4)
    bound = np.maximum(np.abs(f0.numerator), np.abs(f1.numerator))
    assert np.all(np.abs(f.numerator) <= bound + 1e-9)
    assert np.all(np.abs(f.denominator) >= 1e-4)


def test_respond_self_correlation_and_noise():
    label = gaussian_label(64, 64, 4.0)
    for seed in range(10):
        frame = np.random.default_rng(seed).random((120, 120))
        box = BoundingBox(30, 30, 64, 64)
        p = preprocess_patch(frame, box, (64, 64))
        f = train_update(None, p, label)
        r = respond(f, p)
        pr, pc = np.unravel_index(np.argmax(r), r.shape)
        assert abs(pr - 32) <= 1 and abs(pc - 32) <= 1
        shuffled = np.random.default_rng(seed + 100).permutation(frame.ravel()).reshape(frame.shape)
        assert psr(r) > psr(respond(f, preprocess_patch(shuffled, box, (64, 64))))
    assert np.all(respond(f, np.zeros((64, 64))) == 0.0)
    with pytest.raises(ValueError):
        respond(f, np.zeros((32, 32)))


def test_psr_examples():
    assert psr(np.full((32, 32), 3.0)) == 0.0
    spike = np.zeros((64, 64))
    spike[10, 20] = 1.0
    assert psr(spike) == pytest.approx(1e6, rel=1e-12)
    with pytest.raises(ValueError):
        psr(np.zeros((11, 11)), 5)


def test_psr_oracle_equivalence():
    rng = np.random.default_rng(7)
    for _ in range(100):
        h, w = rng.integers(12, 30, 2)
        score = rng.standard_normal((h, w))
        assert psr(score, 5) == pytest.approx(oracles.psr(score.tolist(), 5), rel=0, abs=1e-12)


def test_locate_flat_response_holds():
    assert locate(np.zeros((64, 64))) == (0, 0)
    r = np.zeros((64, 64))
    r[30, 35] = 1.0
    assert locate(r) == (3, -2)


def test_single_frame_sequence():
    frame = np.random.default_rng(0).random((50, 50))
    box = BoundingBox(10, 10, 20, 20)
    result = track_sequence([frame], None, box)
    assert len(result.frames) == 1 and result.frames[0].box == box


def test_translation_and_determinism():
    r = synth.render(synth.preset("translation", 0))
    a = track_sequence(r.float_frames(), None, r.ground_truth[0])
    b = track_sequence(r.float_frames(), None, r.ground_truth[0])
    assert overlaps(a.boxes, r.ground_truth).mean() >= 0.6
    assert [(f.box, f.psr) for f in a.frames] == [(f.box, f.psr) for f in b.frames]


def test_da_with_all_target_depth_matches_baseline():
    r = synth.render(synth.preset("translation", 1))
    flat = [np.full_like(d, 1000.0) for d in r.depths]
    base = track_sequence(r.float_frames(), None, r.ground_truth[0])
    da = track_sequence(r.float_frames(), flat, r.ground_truth[0], da_config=DAConfig())
    assert da.boxes == base.boxes
    assert da.mode == "depth-attention" and base.mode == "baseline"
    assert [f.k1 for f in da.frames[:6]] == [0.0] * 6


def test_da_requires_depth():
    with pytest.raises(ValueError, match="depth maps required"):
        track_sequence([np.zeros((20, 20))], None, BoundingBox(1, 1, 5, 5), da_config=DAConfig())


def test_box_leaving_frame_clamps_centre():
    frames = [np.random.default_rng(i).random((40, 40)) for i in range(5)]
    result = track_sequence(frames, None, BoundingBox(-20, -20, 16, 16))
    for rec in result.frames[1:]:
        cx, cy = rec.box.center
        assert 0 <= cx <= 39 and 0 <= cy <= 39


def test_empty_reference_box_passes_frame_through():
    frames = [np.random.default_rng(i).random((40, 40)) for i in range(3)]
    depths = [np.full((40, 40), 10.0)] * 3
    result = track_sequence(frames, depths, BoundingBox(-30, -30, 8, 8), da_config=DAConfig(k1=1.0))
    assert result.frames[0].k1 == 0.0
