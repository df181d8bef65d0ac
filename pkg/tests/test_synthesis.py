"""Forward-model tests against independent scalar-loop oracles."""

from fractions import Fraction

import numpy as np
import pytest

from shutterforge import (
    ArgumentError,
    BoundsError,
    ExposureSchedule,
    FrameSequence,
    Image,
    PipelineError,
    ShapeError,
    blur_synthesize,
    center_crop,
    latent_indices,
    rs_synthesize,
    sample_latent_targets,
    synthesize_triples,
    window_count,
)


def random_sequence(rng, n, h, w, c=3):
    return FrameSequence(
        [Image(rng.random((h, w, c)).astype(np.float32)) for _ in range(n)]
    )


def blur_oracle(seq, start, length):
    """Pure-Python per-pixel mean, independent of the vectorized path."""
    h, w, c = seq.height, seq.width, seq.channels
    out = np.empty((h, w, c), dtype=np.float32)
    for y in range(h):
        for x in range(w):
            for ch in range(c):
                acc = 0.0
                for t in range(start, start + length):
                    acc += float(seq[t].data[y, x, ch])
                out[y, x, ch] = acc / length
    return out


def rs_oracle(seq, start):
    """Row k copied from frame start+k, scalar loop."""
    h, w, c = seq.height, seq.width, seq.channels
    out = np.empty((h, w, c), dtype=np.float32)
    for k in range(h):
        for x in range(w):
            for ch in range(c):
                out[k, x, ch] = seq[start + k].data[k, x, ch]
    return out


def latent_index_oracle(length, n):
    """Half-up rounding of t*(L-1)/(n-1) via exact rational arithmetic."""
    out = []
    for t in range(n):
        x = Fraction(t * (length - 1), n - 1) + Fraction(1, 2)
        out.append(x.numerator // x.denominator)
    return out


class TestBlur:
    def test_identical_frames_average_to_themselves(self):
        img = Image(np.full((4, 4, 3), 0.625, np.float32))
        seq = FrameSequence([img] * 9)
        out = blur_synthesize(seq, ExposureSchedule(9))
        assert np.array_equal(out.data, img.data)

    def test_three_uniform_frames(self):
        frames = [
            Image(np.full((3, 3, 1), v, np.float32)) for v in (0.0, 0.5, 1.0)
        ]
        out = blur_synthesize(FrameSequence(frames), ExposureSchedule(3))
        assert np.array_equal(out.data, np.full((3, 3, 1), 0.5, np.float32))

    def test_random_sequence_matches_oracle(self):
        rng = np.random.default_rng(42)
        seq = random_sequence(rng, 7, 4, 4)
        out = blur_synthesize(seq, ExposureSchedule(5, window_start=1))
        expected = blur_oracle(seq, 1, 5)
        assert np.abs(out.data - expected).max() <= 1e-6

    def test_window_out_of_range(self):
        seq = random_sequence(np.random.default_rng(0), 4, 3, 3)
        with pytest.raises(BoundsError):
            blur_synthesize(seq, ExposureSchedule(4, window_start=1))

    def test_bounded_by_window_extremes(self):
        rng = np.random.default_rng(9)
        seq = random_sequence(rng, 6, 5, 5)
        out = blur_synthesize(seq, ExposureSchedule(6))
        stack = seq.stack()
        assert (out.data >= stack.min(axis=0) - 1e-7).all()
        assert (out.data <= stack.max(axis=0) + 1e-7).all()


class TestRollingShutter:
    def test_row_ramp(self):
        h = 4
        frames = [
            Image(np.full((h, h, 1), t / (h - 1), np.float32)) for t in range(h)
        ]
        out = rs_synthesize(FrameSequence(frames), ExposureSchedule(h))
        for k in range(h):
            assert np.all(out.data[k] == np.float32(k / (h - 1)))

    def test_static_sequence_is_distortion_free(self):
        rng = np.random.default_rng(1)
        img = Image(rng.random((6, 6, 3)).astype(np.float32))
        seq = FrameSequence([img] * 6)
        out = rs_synthesize(seq, ExposureSchedule(6))
        assert np.array_equal(out.data, img.data)

    def test_random_sequence_matches_oracle_bitwise(self):
        rng = np.random.default_rng(2)
        seq = random_sequence(rng, 10, 8, 8, c=1)
        out = rs_synthesize(seq, ExposureSchedule(8, window_start=2))
        assert np.array_equal(out.data, rs_oracle(seq, 2))

    def test_exposure_must_match_height(self):
        seq = random_sequence(np.random.default_rng(3), 8, 4, 4)
        with pytest.raises(ShapeError):
            rs_synthesize(seq, ExposureSchedule(8))

    def test_window_out_of_range(self):
        seq = random_sequence(np.random.default_rng(4), 5, 4, 4)
        with pytest.raises(BoundsError):
            rs_synthesize(seq, ExposureSchedule(4, window_start=2))


class TestFlipCommutation:
    def test_horizontal_flip_commutes_with_both_models(self):
        rng = np.random.default_rng(12)
        seq = random_sequence(rng, 8, 8, 8)
        flipped = FrameSequence(
            [Image(f.data[:, ::-1, :]) for f in seq]
        )
        w = ExposureSchedule(8)
        assert np.array_equal(
            blur_synthesize(flipped, w).data,
            blur_synthesize(seq, w).data[:, ::-1, :],
        )
        assert np.array_equal(
            rs_synthesize(flipped, w).data,
            rs_synthesize(seq, w).data[:, ::-1, :],
        )

    def test_vertical_flip_breaks_rs_but_not_blur(self):
        # scan order matters: flipping rows changes which frame feeds row k
        rng = np.random.default_rng(13)
        seq = random_sequence(rng, 8, 8, 8)
        flipped = FrameSequence(
            [Image(f.data[::-1, :, :]) for f in seq]
        )
        w = ExposureSchedule(8)
        assert np.array_equal(
            blur_synthesize(flipped, w).data,
            blur_synthesize(seq, w).data[::-1, :, :],
        )
        assert not np.array_equal(
            rs_synthesize(flipped, w).data,
            rs_synthesize(seq, w).data[::-1, :, :],
        )

    def test_rs_rows_shear_under_horizontal_translation(self):
        # ramp translating 1 px/frame: row k shows the ramp shifted by k
        w = 12
        base = np.tile(
            np.linspace(0.0, 1.0, w, dtype=np.float32), (w, 1)
        )[..., None]
        frames = [Image(np.roll(base, t, axis=1)) for t in range(w)]
        out = rs_synthesize(FrameSequence(frames), ExposureSchedule(w))
        for k in range(w):
            assert np.array_equal(out.data[k], np.roll(base, k, axis=1)[k])


class TestLatentSampling:
    def test_identity_when_n_equals_window(self):
        assert latent_indices(9, 9) == list(range(9))

    def test_endpoints_plus_midpoint(self):
        assert latent_indices(9, 3) == [0, 4, 8]

    def test_l25_n5(self):
        assert latent_indices(25, 5) == [0, 6, 12, 18, 24]

    @pytest.mark.parametrize("length,n", [(9, 3), (25, 5), (17, 4), (6, 5), (32, 7)])
    def test_matches_rational_rounding_oracle(self, length, n):
        assert latent_indices(length, n) == latent_index_oracle(length, n)

    def test_endpoints_always_included(self):
        for length in range(2, 30):
            for n in range(2, length + 1):
                idx = latent_indices(length, n)
                assert idx[0] == 0 and idx[-1] == length - 1
                assert idx == sorted(idx)

    def test_n_too_large_rejected(self):
        with pytest.raises(ArgumentError):
            latent_indices(4, 5)

    def test_n_below_two_rejected(self):
        with pytest.raises(ArgumentError):
            latent_indices(4, 1)

    def test_sample_returns_window_frames(self):
        rng = np.random.default_rng(21)
        seq = random_sequence(rng, 12, 4, 4)
        gt = sample_latent_targets(seq, ExposureSchedule(9, window_start=2), 3)
        assert len(gt) == 3
        for frame, idx in zip(gt, (2, 6, 10)):
            assert np.array_equal(frame.data, seq[idx].data)


class TestTriplePipeline:
    def test_tiling_count(self):
        rng = np.random.default_rng(31)
        t, d = 8, 2
        seq = random_sequence(rng, 3 * (t + d), 8, 8, c=1)
        triples = synthesize_triples(seq, t, d, 3, crop=8)
        assert len(triples) == 3
        assert [x.window_start for x in triples] == [0, 10, 20]

    def test_static_source_degeneracy(self):
        img = Image(np.random.default_rng(5).random((8, 8, 3)).astype(np.float32))
        seq = FrameSequence([img] * 20)
        triples = synthesize_triples(seq, 8, 2, 3, crop=8)
        for tr in triples:
            assert np.array_equal(tr.blur.data, tr.rs.data)
            for g in tr.gt:
                assert np.array_equal(g.data, tr.blur.data)

    def test_moving_square_matches_composed_oracle(self):
        # desk-scale end-to-end check composing the two synthesis oracles
        t_len, dead, n_latent, crop = 16, 4, 3, 16
        h = w = 24
        rng = np.random.default_rng(77)
        frames = []
        for t in range(2 * (t_len + dead)):
            canvas = np.full((h, w, 1), 0.1, np.float32)
            y0 = (t // 2) % (h - 6)
            x0 = t % (w - 6)
            canvas[y0 : y0 + 5, x0 : x0 + 5, 0] = 0.9
            frames.append(Image(canvas))
        seq = FrameSequence(frames)
        triples = synthesize_triples(seq, t_len, dead, n_latent, crop)
        cropped = center_crop(seq, crop)
        assert len(triples) == 2
        from shutterforge import latent_indices as li

        for k, tr in enumerate(triples):
            start = k * (t_len + dead)
            blur_exp = blur_oracle(cropped, start, t_len)
            assert np.abs(tr.blur.data - blur_exp).max() <= 1e-6
            assert np.array_equal(tr.rs.data, rs_oracle(cropped, start))
            for frame, rel in zip(tr.gt, li(t_len, n_latent)):
                assert np.array_equal(frame.data, cropped[start + rel].data)

    def test_insufficient_frames_names_required_count(self):
        seq = random_sequence(np.random.default_rng(6), 4, 8, 8)
        with pytest.raises(PipelineError, match="8"):
            synthesize_triples(seq, 8, 0, 3, crop=8)

    def test_exposure_must_equal_crop(self):
        seq = random_sequence(np.random.default_rng(7), 20, 8, 8)
        with pytest.raises(ArgumentError):
            synthesize_triples(seq, 6, 0, 3, crop=8)

    @pytest.mark.parametrize(
        "frames,t,d",
        [(10, 4, 0), (10, 4, 2), (11, 4, 2), (12, 4, 2), (3, 4, 0), (4, 4, 1)],
    )
    def test_window_count_formula(self, frames, t, d):
        expected = 0 if frames < t else (frames - t) // (t + d) + 1
        assert window_count(frames, t, d) == expected
