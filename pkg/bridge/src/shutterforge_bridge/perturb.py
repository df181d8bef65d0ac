"""Perturbation operations on plain float32 arrays."""

from __future__ import annotations

import numpy as np

from shutterforge import ExposureSchedule
from shutterforge import low_light as _low_light
from shutterforge import spatial_shift as _spatial_shift
from shutterforge import stereo_shift as _stereo_shift
from shutterforge import temporal_shift_rs as _temporal_shift_rs
from shutterforge.perturb import DEFAULT_GAMMA_RANGE

from ._convert import as_clip, as_image, as_mask


def spatial_shift(
    img: np.ndarray, max_offset: int, seed: int
) -> tuple[np.ndarray, int, int]:
    out, dx, dy = _spatial_shift(as_image(img), max_offset, seed)
    return out.data, dx, dy


def temporal_shift_rs(
    frames: np.ndarray,
    window_start: int,
    delta_range: tuple[int, int],
    seed: int,
) -> tuple[np.ndarray, int]:
    seq = as_clip(frames, "frames")
    window = ExposureSchedule(seq.height, 0, window_start)
    out, delta = _temporal_shift_rs(seq, window, delta_range, seed)
    return out.data, delta


def low_light(
    img: np.ndarray,
    peak: float,
    gamma_range: tuple[float, float] = DEFAULT_GAMMA_RANGE,
    seed: int = 0,
) -> np.ndarray:
    return _low_light(as_image(img), peak, gamma_range, seed).data


def stereo_shift(img: np.ndarray, disparity: np.ndarray, d_up: float) -> np.ndarray:
    return _stereo_shift(as_image(img), as_mask(disparity, "disparity"), d_up).data
