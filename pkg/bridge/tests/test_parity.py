"""Binding parity: every bound operation matches the core element-wise
on 50 random inputs, with no recomputation in the binding layer."""

import numpy as np
import pytest

import shutterforge as core
import shutterforge_bridge as bridge

N_CASES = 50


def rngs():
    return [np.random.default_rng(seed) for seed in range(N_CASES)]


def rand_img(rng, h=8, w=8, c=3):
    return rng.random((h, w, c)).astype(np.float32)


def rand_clip(rng, t=3, h=8, w=8, c=3):
    return rng.random((t, h, w, c)).astype(np.float32)


def rand_flow(rng, h=8, w=8):
    return (rng.standard_normal((h, w, 2)) * 3).astype(np.float32)


def to_seq(stack):
    return core.FrameSequence([core.Image(f) for f in stack])


class TestSynthParity:
    def test_blur(self):
        for i, rng in enumerate(rngs()):
            frames = rand_clip(rng, t=6)
            got = bridge.synth.blur(frames, exposure_len=4, window_start=1)
            want = core.blur_synthesize(
                to_seq(frames), core.ExposureSchedule(4, 0, 1)
            ).data
            assert np.array_equal(got, want), i

    def test_rs(self):
        for i, rng in enumerate(rngs()):
            frames = rand_clip(rng, t=10, h=8)
            got = bridge.synth.rs(frames, window_start=2)
            want = core.rs_synthesize(
                to_seq(frames), core.ExposureSchedule(8, 0, 2)
            ).data
            assert np.array_equal(got, want), i

    def test_latent_targets(self):
        for i, rng in enumerate(rngs()):
            frames = rand_clip(rng, t=9)
            got = bridge.synth.latent_targets(frames, exposure_len=9, n=3)
            want = np.stack(
                [
                    f.data
                    for f in core.sample_latent_targets(
                        to_seq(frames), core.ExposureSchedule(9), 3
                    )
                ]
            )
            assert np.array_equal(got, want), i

    def test_triples(self):
        rng = np.random.default_rng(123)
        frames = rand_clip(rng, t=20, h=10, w=10)
        got = bridge.synth.triples(frames, 8, 2, 3, crop=8)
        want = core.synthesize_triples(to_seq(frames), 8, 2, 3, 8)
        assert len(got) == len(want)
        for g, w in zip(got, want):
            assert np.array_equal(g["blur"], w.blur.data)
            assert np.array_equal(g["rs"], w.rs.data)
            assert np.array_equal(g["gt"], np.stack([f.data for f in w.gt]))


class TestPerturbParity:
    def test_spatial_shift(self):
        for i, rng in enumerate(rngs()):
            img = rand_img(rng, 10, 10, 1)
            got, gdx, gdy = bridge.perturb.spatial_shift(img, 4, seed=i)
            want, wdx, wdy = core.spatial_shift(core.Image(img), 4, seed=i)
            assert (gdx, gdy) == (wdx, wdy)
            assert np.array_equal(got, want.data), i

    def test_low_light(self):
        for i, rng in enumerate(rngs()):
            img = rand_img(rng, 8, 8, 1)
            got = bridge.perturb.low_light(img, peak=300, seed=i)
            want = core.low_light(core.Image(img), 300, seed=i)
            assert np.array_equal(got, want.data), i

    def test_temporal_shift(self):
        for i, rng in enumerate(rngs()):
            frames = rand_clip(rng, t=20, h=6, w=6)
            got, gdelta = bridge.perturb.temporal_shift_rs(
                frames, 0, (2, 8), seed=i
            )
            want, wdelta = core.temporal_shift_rs(
                to_seq(frames), core.ExposureSchedule(6), (2, 8), seed=i
            )
            assert gdelta == wdelta
            assert np.array_equal(got, want.data), i

    def test_stereo_shift(self):
        for i, rng in enumerate(rngs()):
            img = rand_img(rng, 8, 8, 1)
            disp = rng.random((8, 8)).astype(np.float32)
            got = bridge.perturb.stereo_shift(img, disp, d_up=5.0)
            want = core.stereo_shift(
                core.Image(img), core.MaskMap(disp), 5.0
            )
            assert np.array_equal(got, want.data), i


class TestMaskParity:
    def test_dynamic(self):
        for i, rng in enumerate(rngs()):
            flow = rand_flow(rng)
            got = bridge.masks.dynamic(flow)
            want = core.mask_dynamic(core.FlowField(flow)).data
            assert np.array_equal(got, want), i

    def test_boundary(self):
        for i, rng in enumerate(rngs()):
            clip = rand_clip(rng, t=2)
            got = bridge.masks.boundary(clip)
            want = np.stack(
                [m.data for m in core.mask_boundary(to_seq(clip))]
            )
            assert np.array_equal(got, want), i

    def test_error(self):
        for i, rng in enumerate(rngs()):
            s, t, g = rand_clip(rng, 2), rand_clip(rng, 2), rand_clip(rng, 2)
            got = bridge.masks.error(s, t, g)
            want = np.stack(
                [
                    m.data
                    for m in core.mask_error(to_seq(s), to_seq(t), to_seq(g))
                ]
            )
            assert np.array_equal(got, want), i

    def test_combine(self):
        for i, rng in enumerate(rngs()):
            d, b, e = (rng.random((6, 6)).astype(np.float32) for _ in range(3))
            got = bridge.masks.combine(d, b, e, weights=(0.5, 0.25, 0.25))
            want = core.mask_combine(
                core.MaskMap(d), core.MaskMap(b), core.MaskMap(e),
                core.MaskWeights(0.5, 0.25, 0.25),
            ).data
            assert np.array_equal(got, want), i


class TestLossParity:
    def test_distill(self):
        for i, rng in enumerate(rngs()):
            fs, ft = rand_flow(rng), rand_flow(rng)
            m = rng.random((8, 8)).astype(np.float32)
            got = bridge.losses.distill(fs, ft, m)
            want = core.loss_distill(
                core.FlowField(fs), core.FlowField(ft), core.MaskMap(m)
            )
            assert got == want, i

    def test_charbonnier(self):
        for i, rng in enumerate(rngs()):
            s, g = rand_clip(rng, 2), rand_clip(rng, 2)
            got = bridge.losses.charbonnier(s, g)
            want = core.loss_charbonnier(to_seq(s), to_seq(g))
            assert got == want, i

    def test_total(self):
        for i, rng in enumerate(rngs()):
            vals = rng.random(3)
            got = bridge.losses.total(*vals)
            want = core.loss_total(*vals)
            assert got == want, i


class TestMetricParity:
    def test_pair_metrics(self):
        for i, rng in enumerate(rngs()):
            a = rand_img(rng, 12, 12, 1)
            b = (rng.random((12, 12, 1)) * 0.9 + 0.1).astype(np.float32)
            av = (a * 0.9 + np.float32(0.1)).astype(np.float32)
            ia, ib = core.Image(av), core.Image(b)
            assert bridge.metrics.mse(av, b) == core.mse(ia, ib)
            assert bridge.metrics.psnr(av, b) == core.psnr(ia, ib)
            assert bridge.metrics.ssim(av, b) == core.ssim(ia, ib)
            assert bridge.metrics.abs_rel(av, b) == core.abs_rel(ia, ib)
            assert bridge.metrics.delta_accuracy(
                av, b, 1.25
            ) == core.delta_accuracy(ia, ib, 1.25)

    def test_temporal_profile(self):
        for i, rng in enumerate(rngs()):
            clip = rand_clip(rng, t=4, h=6, w=6, c=1)
            got = bridge.metrics.temporal_profile(clip, 2)
            want = core.temporal_profile(to_seq(clip), 2).data
            assert np.array_equal(got, want), i

    def test_tof(self):
        for i, rng in enumerate(rngs()):
            p, g = rand_clip(rng, 3, 8, 8, 1), rand_clip(rng, 3, 8, 8, 1)
            got = bridge.metrics.tof(p, g, block=4, radius=1)
            want = core.tof(to_seq(p), to_seq(g), 4, 1)
            assert got == want, i


class TestGuards:
    def test_wrong_dtype_rejected_before_core(self):
        with pytest.raises(TypeError, match="float32"):
            bridge.metrics.mse(
                np.zeros((4, 4, 1), np.float64), np.zeros((4, 4, 1), np.float32)
            )

    def test_wrong_rank_rejected(self):
        with pytest.raises(ValueError, match="dims"):
            bridge.synth.blur(np.zeros((4, 4, 1), np.float32), 2)

    def test_non_array_rejected(self):
        with pytest.raises(TypeError):
            bridge.masks.dynamic([[1.0, 2.0]])

    def test_core_errors_carry_message(self):
        frames = np.zeros((2, 4, 4, 1), np.float32)
        with pytest.raises(core.BoundsError, match="window"):
            bridge.synth.blur(frames, exposure_len=4)

    def test_zero_copy_for_contiguous_input(self):
        img = np.random.default_rng(0).random((6, 6, 1)).astype(np.float32)
        wrapped = bridge._convert.as_image(img)
        assert wrapped.data.base is img or wrapped.data is img
