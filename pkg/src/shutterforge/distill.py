"""Region-adaptive distillation masks and the training objectives.

Three masks pick out where flow supervision matters: M_d flags highly
dynamic pixels (flow magnitude above Q3 + k*IQR), M_b weights object
boundaries (min-max normalized Sobel gradient of the ground truth), and
M_e flags pixels where the student reconstruction is worse than the
teacher's.  Their weighted mean gates an L1 flow distillation loss, which
joins two Charbonnier reconstruction terms in the total objective.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ArgumentError, NumericError, ShapeError, ValidationError
from .flowops import flow_magnitude
from .tensors import FlowField, FrameSequence, Image, MaskMap

DEFAULT_OUTLIER_COEFF = 2.0
DEFAULT_CHARBONNIER_EPS = 1e-3
DEFAULT_LAMBDA_D = 1e-4

_LUMA = np.array([0.299, 0.587, 0.114], dtype=np.float64)


@dataclass(frozen=True)
class MaskWeights:
    """Convex weights for combining the three masks (default: plain mean)."""

    w_d: float = 1.0 / 3.0
    w_b: float = 1.0 / 3.0
    w_e: float = 1.0 / 3.0

    def __post_init__(self) -> None:
        for name, w in (("w_d", self.w_d), ("w_b", self.w_b), ("w_e", self.w_e)):
            if not 0.0 <= w <= 1.0:
                raise ValidationError(f"{name} must lie in [0, 1], got {w}")
        total = self.w_d + self.w_b + self.w_e
        if abs(total - 1.0) > 1e-9:
            raise ValidationError(f"mask weights must sum to 1, got {total}")


def mask_dynamic(f_t: FlowField, k: float = DEFAULT_OUTLIER_COEFF) -> MaskMap:
    """Binary mask of flow-magnitude outliers: |F| > Q3 + k * (Q3 - Q1).

    Quartiles use linear interpolation between order statistics; the
    strict > means a constant-magnitude field maps to all zeros.
    """
    if k < 0:
        raise ArgumentError(f"coefficient k must be >= 0, got {k}")
    mag = flow_magnitude(f_t).astype(np.float64)
    q1, q3 = np.percentile(mag, [25.0, 75.0])
    threshold = q3 + k * (q3 - q1)
    return MaskMap((mag > threshold).astype(np.float32))


def _luminance(img: Image) -> np.ndarray:
    data = img.data.astype(np.float64)
    if img.channels == 1:
        return data[..., 0]
    return data @ _LUMA


def _sobel_magnitude(lum: np.ndarray) -> np.ndarray:
    p = np.pad(lum, 1, mode="edge")
    gx = (
        (p[:-2, 2:] + 2.0 * p[1:-1, 2:] + p[2:, 2:])
        - (p[:-2, :-2] + 2.0 * p[1:-1, :-2] + p[2:, :-2])
    )
    gy = (
        (p[2:, :-2] + 2.0 * p[2:, 1:-1] + p[2:, 2:])
        - (p[:-2, :-2] + 2.0 * p[:-2, 1:-1] + p[:-2, 2:])
    )
    return np.sqrt(gx * gx + gy * gy)


def mask_boundary(gt: FrameSequence) -> list[MaskMap]:
    """Min-max normalized Sobel gradient magnitude, one mask per frame.

    RGB frames reduce to luminance first; a constant frame (zero gradient
    everywhere) yields the all-zero mask.
    """
    masks = []
    for frame in gt:
        g = _sobel_magnitude(_luminance(frame))
        lo, hi = g.min(), g.max()
        if hi == lo:
            masks.append(MaskMap(np.zeros(g.shape, dtype=np.float32)))
        else:
            masks.append(MaskMap(((g - lo) / (hi - lo)).astype(np.float32)))
    return masks


def mask_error(
    s_student: FrameSequence, s_teacher: FrameSequence, gt: FrameSequence
) -> list[MaskMap]:
    """1 where the student's channel-summed L1 error strictly exceeds the
    teacher's, per frame per pixel."""
    if not (
        len(s_student) == len(s_teacher) == len(gt)
        and s_student[0].data.shape == s_teacher[0].data.shape == gt[0].data.shape
    ):
        raise ShapeError("student/teacher/gt sequences must share shape")
    masks = []
    for s, t, g in zip(s_student, s_teacher, gt):
        e_s = np.abs(s.data.astype(np.float64) - g.data.astype(np.float64)).sum(axis=2)
        e_t = np.abs(t.data.astype(np.float64) - g.data.astype(np.float64)).sum(axis=2)
        masks.append(MaskMap((e_s > e_t).astype(np.float32)))
    return masks


def mask_combine(
    m_d: MaskMap,
    m_b: MaskMap,
    m_e: MaskMap,
    weights: MaskWeights = MaskWeights(),
) -> MaskMap:
    """Weighted combination of the three masks (uniform weights = mean)."""
    if not (m_d.data.shape == m_b.data.shape == m_e.data.shape):
        raise ShapeError("masks must share shape to combine")
    out = (
        weights.w_d * m_d.data.astype(np.float64)
        + weights.w_b * m_b.data.astype(np.float64)
        + weights.w_e * m_e.data.astype(np.float64)
    )
    # weights sum to 1 only within 1e-9; clamp the residual excursion
    return MaskMap(np.clip(out, 0.0, 1.0).astype(np.float32))


def _as_flow_list(f) -> list[FlowField]:
    if isinstance(f, FlowField):
        return [f]
    return list(f)


def loss_distill(f_student, f_teacher, m: MaskMap) -> float:
    """Masked mean L1 between student and teacher flows.

    Accepts single fields or equal-length sequences; the mask broadcasts
    over both flow components of every field.
    """
    fs = _as_flow_list(f_student)
    ft = _as_flow_list(f_teacher)
    if len(fs) != len(ft):
        raise ShapeError(f"flow counts differ: {len(fs)} vs {len(ft)}")
    total = 0.0
    count = 0
    for s, t in zip(fs, ft):
        if s.data.shape != t.data.shape:
            raise ShapeError(
                f"flow shapes differ: {s.data.shape} vs {t.data.shape}"
            )
        if m.data.shape != s.data.shape[:2]:
            raise ShapeError(
                f"mask {m.data.shape} does not match flow {s.data.shape[:2]}"
            )
        diff = np.abs(s.data.astype(np.float64) - t.data.astype(np.float64))
        total += float((m.data.astype(np.float64)[..., None] * diff).sum())
        count += diff.size
    return total / count


def loss_charbonnier(
    s: FrameSequence,
    g: FrameSequence,
    eps: float = DEFAULT_CHARBONNIER_EPS,
    form: str = "elementwise",
) -> float:
    """Charbonnier reconstruction loss sqrt(d^2 + eps^2).

    form="elementwise" (default) averages the per-element Charbonnier,
    the standard in restoration practice; form="global" evaluates the
    literal single sqrt over the whole squared residual norm.
    """
    if eps <= 0:
        raise ArgumentError(f"eps must be > 0, got {eps}")
    if len(s) != len(g) or s[0].data.shape != g[0].data.shape:
        raise ShapeError("clip shapes differ")
    if form not in ("elementwise", "global"):
        raise ArgumentError(f"unknown charbonnier form {form!r}")
    e2 = eps * eps
    if form == "global":
        sq = 0.0
        for a, b in zip(s, g):
            d = a.data.astype(np.float64) - b.data.astype(np.float64)
            sq += float((d * d).sum())
        return float(np.sqrt(sq + e2))
    # mean is anchored at eps: every term satisfies sqrt(d^2+e2) >= eps,
    # so a zero residual yields exactly eps for every clip size
    excess = 0.0
    count = 0
    for a, b in zip(s, g):
        d = a.data.astype(np.float64) - b.data.astype(np.float64)
        excess += float((np.sqrt(d * d + e2) - eps).sum())
        count += d.size
    return eps + excess / count


def loss_total(
    l_rec: float,
    l_rec_t: float,
    l_dis: float,
    lambda_d: float = DEFAULT_LAMBDA_D,
) -> float:
    """Total objective: l_rec + l_rec_t + lambda_d * l_dis."""
    parts = (l_rec, l_rec_t, l_dis, lambda_d)
    if not all(np.isfinite(p) for p in parts):
        raise NumericError(f"non-finite loss inputs: {parts}")
    return l_rec + l_rec_t + lambda_d * l_dis
