"""Metric operations on plain float32 arrays."""

from __future__ import annotations

import numpy as np

from shutterforge import abs_rel as _abs_rel
from shutterforge import delta_accuracy as _delta
from shutterforge import mse as _mse
from shutterforge import psnr as _psnr
from shutterforge import ssim as _ssim
from shutterforge import temporal_profile as _profile
from shutterforge import tof as _tof
from shutterforge.metrics import DEFAULT_PSNR_CAP_DB, DEFAULT_VALID_MIN

from ._convert import as_clip, as_image


def mse(a: np.ndarray, b: np.ndarray) -> float:
    return _mse(as_image(a), as_image(b))


def psnr(a: np.ndarray, b: np.ndarray, cap_db: float = DEFAULT_PSNR_CAP_DB) -> float:
    return _psnr(as_image(a), as_image(b), cap_db)


def ssim(a: np.ndarray, b: np.ndarray) -> float:
    return _ssim(as_image(a), as_image(b))


def abs_rel(d: np.ndarray, gt: np.ndarray, valid_min: float = DEFAULT_VALID_MIN) -> float:
    return _abs_rel(as_image(d), as_image(gt), valid_min)


def delta_accuracy(
    d: np.ndarray, gt: np.ndarray, thr: float, valid_min: float = DEFAULT_VALID_MIN
) -> float:
    return _delta(as_image(d), as_image(gt), thr, valid_min)


def temporal_profile(frames: np.ndarray, column: int) -> np.ndarray:
    return _profile(as_clip(frames, "frames"), column).data


def tof(pred: np.ndarray, gt: np.ndarray, block: int = 8, radius: int = 4) -> float:
    return _tof(as_clip(pred, "pred"), as_clip(gt, "gt"), block, radius)
