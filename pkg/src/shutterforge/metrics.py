"""Image/video quality and alignment metrics."""

from __future__ import annotations

import numpy as np
from scipy.ndimage import correlate

from .errors import ArgumentError, BoundsError, DegenerateInputError, ShapeError
from .flowops import block_flow
from .tensors import FrameSequence, Image

DEFAULT_PSNR_CAP_DB = 100.0
DEFAULT_VALID_MIN = 1.0 / 255.0
DELTA_THRESHOLDS = (1.15, 1.25, 1.35)

_SSIM_WINDOW = 11
_SSIM_SIGMA = 1.5
_SSIM_K1 = 0.01
_SSIM_K2 = 0.03

_LUMA = np.array([0.299, 0.587, 0.114], dtype=np.float64)


def _check_pair(a: Image, b: Image, what: str) -> None:
    if a.data.shape != b.data.shape:
        raise ShapeError(f"{what}: {a.data.shape} vs {b.data.shape}")


def mse(a: Image, b: Image) -> float:
    """Mean squared difference over all elements."""
    _check_pair(a, b, "mse shape mismatch")
    d = a.data.astype(np.float64) - b.data.astype(np.float64)
    return float((d * d).mean())


def psnr(a: Image, b: Image, cap_db: float = DEFAULT_PSNR_CAP_DB) -> float:
    """10*log10(1/mse) for unit dynamic range; cap_db for identical images."""
    m = mse(a, b)
    if m == 0.0:
        return cap_db
    return float(10.0 * np.log10(1.0 / m))


def _gaussian_window() -> np.ndarray:
    half = _SSIM_WINDOW // 2
    x = np.arange(-half, half + 1, dtype=np.float64)
    g = np.exp(-(x * x) / (2.0 * _SSIM_SIGMA * _SSIM_SIGMA))
    win = np.outer(g, g)
    return win / win.sum()


def _to_gray(img: Image) -> np.ndarray:
    data = img.data.astype(np.float64)
    if img.channels == 1:
        return data[..., 0]
    return data @ _LUMA


def ssim(a: Image, b: Image) -> float:
    """Mean local SSIM, 11x11 Gaussian window sigma=1.5, replicate padding.

    K1=0.01, K2=0.03, dynamic range 1.0; RGB reduces to luminance first.
    """
    _check_pair(a, b, "ssim shape mismatch")
    if min(a.height, a.width) < _SSIM_WINDOW:
        raise ArgumentError(
            f"image {a.height}x{a.width} smaller than the "
            f"{_SSIM_WINDOW}x{_SSIM_WINDOW} SSIM window"
        )
    x = _to_gray(a)
    y = _to_gray(b)
    win = _gaussian_window()
    c1 = (_SSIM_K1 * 1.0) ** 2
    c2 = (_SSIM_K2 * 1.0) ** 2

    mu_x = correlate(x, win, mode="nearest")
    mu_y = correlate(y, win, mode="nearest")
    var_x = correlate(x * x, win, mode="nearest") - mu_x * mu_x
    var_y = correlate(y * y, win, mode="nearest") - mu_y * mu_y
    cov = correlate(x * y, win, mode="nearest") - mu_x * mu_y

    num = (2.0 * mu_x * mu_y + c1) * (2.0 * cov + c2)
    den = (mu_x * mu_x + mu_y * mu_y + c1) * (var_x + var_y + c2)
    return float((num / den).mean())


def abs_rel(d: Image, gt: Image, valid_min: float = DEFAULT_VALID_MIN) -> float:
    """Mean relative error |d - gt| / gt over pixels with gt >= valid_min."""
    _check_pair(d, gt, "abs_rel shape mismatch")
    dd = d.data.astype(np.float64)
    gg = gt.data.astype(np.float64)
    valid = gg >= valid_min
    if not valid.any():
        raise DegenerateInputError(
            f"no pixels with ground truth >= {valid_min}"
        )
    return float((np.abs(dd[valid] - gg[valid]) / gg[valid]).mean())


def delta_accuracy(
    d: Image,
    gt: Image,
    thr: float,
    valid_min: float = DEFAULT_VALID_MIN,
) -> float:
    """Fraction of valid pixels with max(d/gt, gt/d) < thr."""
    if thr <= 1.0:
        raise ArgumentError(f"threshold must exceed 1, got {thr}")
    _check_pair(d, gt, "delta_accuracy shape mismatch")
    dd = d.data.astype(np.float64)
    gg = gt.data.astype(np.float64)
    valid = (dd >= valid_min) & (gg >= valid_min)
    if not valid.any():
        raise DegenerateInputError(
            f"no pixels with both values >= {valid_min}"
        )
    ratio = np.maximum(dd[valid] / gg[valid], gg[valid] / dd[valid])
    return float((ratio < thr).mean())


def temporal_profile(seq: FrameSequence, column: int) -> Image:
    """H x T image whose column t is column `column` of frame t."""
    if not 0 <= column < seq.width:
        raise BoundsError(
            f"column {column} outside [0, {seq.width - 1}]"
        )
    out = np.empty((seq.height, len(seq), seq.channels), dtype=np.float32)
    for t, frame in enumerate(seq):
        out[:, t, :] = frame.data[:, column, :]
    return Image(out)


def tof(
    pred: FrameSequence,
    gt: FrameSequence,
    block: int = 8,
    radius: int = 4,
) -> float:
    """Temporal flow consistency: mean per-component L1 gap between the
    block-matched inter-frame flows of pred and gt.

    Uses the package's exhaustive-SAD block matcher as a fixed, learned-
    model-free flow oracle; values are not comparable to tOF numbers
    computed with other estimators.
    """
    if len(pred) != len(gt):
        raise ArgumentError(
            f"sequence lengths differ: {len(pred)} vs {len(gt)}"
        )
    if len(pred) < 2:
        raise ArgumentError("tOF needs at least 2 frames")
    if pred[0].data.shape != gt[0].data.shape:
        raise ShapeError(
            f"tof shape mismatch: {pred[0].data.shape} vs {gt[0].data.shape}"
        )
    total = 0.0
    pairs = len(pred) - 1
    for t in range(pairs):
        fp = block_flow(pred[t], pred[t + 1], block, radius)
        fg = block_flow(gt[t], gt[t + 1], block, radius)
        total += float(
            np.abs(
                fp.data.astype(np.float64) - fg.data.astype(np.float64)
            ).mean()
        )
    return total / pairs
