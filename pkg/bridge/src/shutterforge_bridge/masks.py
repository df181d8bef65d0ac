"""Distillation mask operations on plain float32 arrays."""

from __future__ import annotations

import numpy as np

from shutterforge import MaskWeights
from shutterforge import mask_boundary as _boundary
from shutterforge import mask_combine as _combine
from shutterforge import mask_dynamic as _dynamic
from shutterforge import mask_error as _error
from shutterforge.distill import DEFAULT_OUTLIER_COEFF

from ._convert import as_clip, as_flow, as_mask


def dynamic(flow: np.ndarray, k: float = DEFAULT_OUTLIER_COEFF) -> np.ndarray:
    return _dynamic(as_flow(flow), k).data


def boundary(gt: np.ndarray) -> np.ndarray:
    """(T, H, W) stack of min-max normalized gradient masks."""
    return np.stack([m.data for m in _boundary(as_clip(gt, "gt"))])


def error(student: np.ndarray, teacher: np.ndarray, gt: np.ndarray) -> np.ndarray:
    masks = _error(
        as_clip(student, "student"), as_clip(teacher, "teacher"), as_clip(gt, "gt")
    )
    return np.stack([m.data for m in masks])


def combine(
    m_d: np.ndarray,
    m_b: np.ndarray,
    m_e: np.ndarray,
    weights: tuple[float, float, float] = (1 / 3, 1 / 3, 1 / 3),
) -> np.ndarray:
    return _combine(
        as_mask(m_d, "m_d"),
        as_mask(m_b, "m_b"),
        as_mask(m_e, "m_e"),
        MaskWeights(*weights),
    ).data
