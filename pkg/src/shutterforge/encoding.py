"""Temporal positional encodings relating RS row readout to latent time.

The RS map assigns each row its readout index k; each latent frame t gets
a constant map (H-1) * t / (N-1), i.e. its uniform temporal index scaled
to the row range.  The relative encoding is their difference, one map per
latent frame.  Values are emitted unnormalized, in raw row units.
"""

from __future__ import annotations

import numpy as np

from .errors import ArgumentError
from .tensors import EncodingMap


def _check_dims(height: int, width: int | None) -> int:
    if height < 2:
        raise ArgumentError(f"height must be >= 2, got {height}")
    width = height if width is None else width
    if width < 1:
        raise ArgumentError(f"width must be >= 1, got {width}")
    return width


def tpe_rs(height: int, width: int | None = None) -> EncodingMap:
    """Row-readout encoding: row k holds the value k."""
    width = _check_dims(height, width)
    rows = np.arange(height, dtype=np.float64)
    return EncodingMap(
        np.broadcast_to(rows[:, None], (height, width)).astype(np.float32)
    )


def _latent_offset(height: int, n_latent: int, t: int) -> float:
    if n_latent < 2:
        raise ArgumentError(f"n_latent must be >= 2, got {n_latent}")
    if not 0 <= t <= n_latent - 1:
        raise ArgumentError(
            f"latent index {t} outside [0, {n_latent - 1}]"
        )
    return (height - 1) * t / (n_latent - 1)


def tpe_latent(
    height: int, n_latent: int, t: int, width: int | None = None
) -> EncodingMap:
    """Constant map (H-1) * t / (N-1): the latent frame's temporal index."""
    width = _check_dims(height, width)
    value = _latent_offset(height, n_latent, t)
    return EncodingMap(np.full((height, width), value, dtype=np.float32))


def tpe_relative(
    height: int, n_latent: int, width: int | None = None
) -> list[EncodingMap]:
    """N relative maps; map t has row k valued k - (H-1) * t / (N-1)."""
    width = _check_dims(height, width)
    rows = np.arange(height, dtype=np.float64)
    maps = []
    for t in range(n_latent):
        offset = _latent_offset(height, n_latent, t)
        col = rows - offset
        maps.append(
            EncodingMap(
                np.broadcast_to(col[:, None], (height, width)).astype(np.float32)
            )
        )
    return maps
