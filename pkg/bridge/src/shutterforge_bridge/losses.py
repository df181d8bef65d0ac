"""Loss functions on plain float32 arrays."""

from __future__ import annotations

import numpy as np

from shutterforge import loss_charbonnier as _charbonnier
from shutterforge import loss_distill as _distill
from shutterforge import loss_total as _total
from shutterforge.distill import DEFAULT_CHARBONNIER_EPS, DEFAULT_LAMBDA_D

from ._convert import as_clip, as_flow, as_mask, require_array


def distill(
    f_student: np.ndarray, f_teacher: np.ndarray, mask: np.ndarray
) -> float:
    """Masked L1 between flow stacks of shape (N, H, W, 2) or (H, W, 2)."""
    if isinstance(f_student, np.ndarray) and f_student.ndim == 3:
        fs = [as_flow(f_student, "f_student")]
        ft = [as_flow(f_teacher, "f_teacher")]
    else:
        require_array(f_student, 4, "f_student")
        require_array(f_teacher, 4, "f_teacher")
        fs = [as_flow(f) for f in f_student]
        ft = [as_flow(f) for f in f_teacher]
    return _distill(fs, ft, as_mask(mask))


def charbonnier(
    student: np.ndarray,
    gt: np.ndarray,
    eps: float = DEFAULT_CHARBONNIER_EPS,
    form: str = "elementwise",
) -> float:
    return _charbonnier(as_clip(student, "student"), as_clip(gt, "gt"), eps, form)


def total(
    l_rec: float,
    l_rec_t: float,
    l_dis: float,
    lambda_d: float = DEFAULT_LAMBDA_D,
) -> float:
    return _total(l_rec, l_rec_t, l_dis, lambda_d)
