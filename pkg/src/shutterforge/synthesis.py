"""Forward degradation models: blur averaging and rolling-shutter rows.

A blurred frame is the per-pixel arithmetic mean of the latent frames
inside the exposure window (temporal integration, discretized in the
sRGB domain).  A rolling-shutter frame takes its k-th row from the
latent frame captured at row-readout time k, so its exposure length must
equal the image height.  Both views of one window see identical scene
content, which is what makes the synthesized pairs aligned.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError, BoundsError, PipelineError, ShapeError
from .tensors import ExposureSchedule, FrameSequence, Image


@dataclass(frozen=True)
class TripleSample:
    """One aligned (blur, rs, ground-truth clip) sample.

    The gt clip holds the n_latent uniformly sampled latent frames of the
    window, in temporal order; blur, rs and every gt frame share shape.
    """

    blur: Image
    rs: Image
    gt: FrameSequence
    window_start: int
    exposure_len: int
    n_latent: int


def _check_window(seq: FrameSequence, window: ExposureSchedule) -> None:
    end = window.window_start + window.exposure_len
    if end > len(seq):
        raise BoundsError(
            f"window [{window.window_start}, {end}) exceeds sequence of "
            f"{len(seq)} frames"
        )


def blur_synthesize(seq: FrameSequence, window: ExposureSchedule) -> Image:
    """Per-pixel mean of the exposure_len frames starting at window_start."""
    _check_window(seq, window)
    s = window.window_start
    frames = seq.frames[s : s + window.exposure_len]
    acc = np.zeros(frames[0].data.shape, dtype=np.float64)
    for f in frames:
        acc += f.data
    return Image((acc / len(frames)).astype(np.float32))


def rs_synthesize(seq: FrameSequence, window: ExposureSchedule) -> Image:
    """Row k of the output is row k of frame (window_start + k)."""
    h = seq.height
    if window.exposure_len != h:
        raise ShapeError(
            f"rolling shutter needs exposure_len == height "
            f"({window.exposure_len} != {h})"
        )
    _check_window(seq, window)
    s = window.window_start
    out = np.empty((h, seq.width, seq.channels), dtype=np.float32)
    for k in range(h):
        out[k] = seq.frames[s + k].data[k]
    return Image(out)


def latent_indices(exposure_len: int, n: int) -> list[int]:
    """Window-relative indices of n uniformly sampled latent frames.

    Endpoint-inclusive: index t is round(t * (L-1) / (n-1)) with half-up
    rounding, so the first and last frames of the window always appear.
    """
    if n < 2:
        raise ArgumentError(f"need at least 2 latent targets, got {n}")
    if n > exposure_len:
        raise ArgumentError(
            f"cannot sample {n} latent targets from a window of {exposure_len}"
        )
    d = n - 1
    return [(2 * t * (exposure_len - 1) + d) // (2 * d) for t in range(n)]


def sample_latent_targets(
    seq: FrameSequence, window: ExposureSchedule, n: int
) -> FrameSequence:
    """The n uniformly sampled latent frames inside the window."""
    _check_window(seq, window)
    s = window.window_start
    picks = [seq.frames[s + i] for i in latent_indices(window.exposure_len, n)]
    return FrameSequence(picks)


def center_crop(seq: FrameSequence, size: int) -> FrameSequence:
    """Center-crop every frame to size x size (floor-aligned offsets)."""
    if size > seq.height or size > seq.width:
        raise ArgumentError(
            f"crop {size} exceeds source {seq.height}x{seq.width}"
        )
    oy = (seq.height - size) // 2
    ox = (seq.width - size) // 2
    return FrameSequence(
        [Image(f.data[oy : oy + size, ox : ox + size]) for f in seq.frames],
        schedule=seq.schedule,
    )


def window_count(n_frames: int, exposure_len: int, deadtime_len: int) -> int:
    """How many full exposure windows tile a sequence of n_frames."""
    if n_frames < exposure_len:
        return 0
    return (n_frames - exposure_len) // (exposure_len + deadtime_len) + 1


def synthesize_triples(
    seq: FrameSequence,
    exposure_len: int,
    deadtime_len: int,
    n_latent: int,
    crop: int,
) -> list[TripleSample]:
    """Tile exposure windows over a sequence and emit aligned triples.

    Frames are center-cropped to crop x crop first; exposure_len must
    equal crop so the rolling-shutter precondition (one row per latent
    frame) holds.  Windows advance by exposure_len + deadtime_len, and
    blur/rs consume the identical window per triple.
    """
    if exposure_len != crop:
        raise ArgumentError(
            f"exposure_len must equal crop height ({exposure_len} != {crop})"
        )
    cropped = center_crop(seq, crop)
    n = window_count(len(cropped), exposure_len, deadtime_len)
    if n == 0:
        raise PipelineError(
            f"need at least {exposure_len} frames for one window, "
            f"got {len(cropped)}"
        )
    triples = []
    for w in range(n):
        start = w * (exposure_len + deadtime_len)
        window = ExposureSchedule(exposure_len, deadtime_len, start)
        triples.append(
            TripleSample(
                blur=blur_synthesize(cropped, window),
                rs=rs_synthesize(cropped, window),
                gt=sample_latent_targets(cropped, window, n_latent),
                window_start=start,
                exposure_len=exposure_len,
                n_latent=n_latent,
            )
        )
    return triples
