"""Synthesis operations on plain float32 arrays."""

from __future__ import annotations

import numpy as np

from shutterforge import ExposureSchedule
from shutterforge import blur_synthesize as _blur
from shutterforge import rs_synthesize as _rs
from shutterforge import sample_latent_targets as _sample
from shutterforge import synthesize_triples as _triples

from ._convert import as_clip, clip_to_stack


def blur(frames: np.ndarray, exposure_len: int, window_start: int = 0) -> np.ndarray:
    """Mean of frames[window_start : window_start + exposure_len].

    frames: (T, H, W, C) float32; returns (H, W, C) float32.
    """
    seq = as_clip(frames, "frames")
    return _blur(seq, ExposureSchedule(exposure_len, 0, window_start)).data


def rs(frames: np.ndarray, window_start: int = 0) -> np.ndarray:
    """Rolling-shutter readout; exposure length is the frame height."""
    seq = as_clip(frames, "frames")
    return _rs(seq, ExposureSchedule(seq.height, 0, window_start)).data


def latent_targets(
    frames: np.ndarray, exposure_len: int, n: int, window_start: int = 0
) -> np.ndarray:
    """(n, H, W, C) stack of uniformly sampled latent frames."""
    seq = as_clip(frames, "frames")
    out = _sample(seq, ExposureSchedule(exposure_len, 0, window_start), n)
    return clip_to_stack(out)


def triples(
    frames: np.ndarray,
    exposure_len: int,
    deadtime_len: int,
    n_latent: int,
    crop: int,
) -> list[dict]:
    """Windowed blur/rs/gt triples as dicts of arrays."""
    seq = as_clip(frames, "frames")
    out = []
    for t in _triples(seq, exposure_len, deadtime_len, n_latent, crop):
        out.append(
            {
                "blur": t.blur.data,
                "rs": t.rs.data,
                "gt": clip_to_stack(t.gt),
                "window_start": t.window_start,
            }
        )
    return out
