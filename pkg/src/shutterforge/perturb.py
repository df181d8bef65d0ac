"""Robustness perturbations: misalignment, exposure delay, low light, stereo.

All four are deterministic functions of (inputs, seed).  Random draws come
from counter-based streams (see rng), so outputs never depend on
evaluation order; per-pixel noise uses one uniform per element keyed by
(seed, element index).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np
from scipy.special import gammaln, ndtri

from . import rng
from .errors import ArgumentError, BoundsError, ShapeError, ValidationError
from .flowops import bilinear_sample
from .synthesis import rs_synthesize
from .tensors import ExposureSchedule, FrameSequence, Image, MaskMap

PERTURB_KINDS = ("spatial_shift", "temporal_shift", "low_light", "stereo")

# Poisson sampling: inversion of the CDF below this mean, normal
# approximation above.  Chosen for cross-platform reproducibility over
# statistical elegance; desk-scale peaks (300..800) stay on the
# inversion branch.
POISSON_NORMAL_CUTOVER = 1000.0

DEFAULT_GAMMA_RANGE = (2.0, 3.5)


@dataclass(frozen=True)
class PerturbSpec:
    """Declarative record of one perturbation, serializable into manifests."""

    kind: str
    params: Mapping[str, Any] = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self) -> None:
        if self.kind not in PERTURB_KINDS:
            raise ValidationError(
                f"unknown perturbation kind {self.kind!r}; "
                f"expected one of {PERTURB_KINDS}"
            )
        p = dict(self.params)
        object.__setattr__(self, "params", p)
        if self.kind == "spatial_shift":
            if p.get("max_offset", 0) < 0:
                raise ValidationError("spatial_shift max_offset must be >= 0")
        elif self.kind == "temporal_shift":
            lo, hi = p.get("delta_lo", 0), p.get("delta_hi", 0)
            if lo > hi:
                raise ValidationError(
                    f"temporal_shift range empty: [{lo}, {hi}]"
                )
            if lo < 0:
                raise ValidationError("temporal_shift delta_lo must be >= 0")
        elif self.kind == "low_light":
            if p.get("peak", 0) <= 0:
                raise ValidationError("low_light peak must be > 0")
            g_lo = p.get("gamma_lo", DEFAULT_GAMMA_RANGE[0])
            g_hi = p.get("gamma_hi", DEFAULT_GAMMA_RANGE[1])
            if not 0 < g_lo <= g_hi:
                raise ValidationError(
                    f"low_light gamma range invalid: [{g_lo}, {g_hi}]"
                )
        elif self.kind == "stereo":
            if p.get("d_up", 0) < 0:
                raise ValidationError("stereo d_up must be >= 0")

    def to_json(self) -> dict:
        return {"kind": self.kind, "params": dict(self.params), "seed": self.seed}

    @classmethod
    def from_json(cls, obj: Mapping[str, Any]) -> "PerturbSpec":
        return cls(kind=obj["kind"], params=obj.get("params", {}),
                   seed=int(obj.get("seed", 0)))


def spatial_shift(
    img: Image, max_offset: int, seed: int
) -> tuple[Image, int, int]:
    """Translate by integer (dx, dy) ~ U[-max_offset, max_offset]^2.

    Edge-replicate padding fills uncovered pixels.  Returns the shifted
    image and the drawn offsets.
    """
    if max_offset < 0:
        raise ArgumentError(f"max_offset must be >= 0, got {max_offset}")
    if max_offset >= min(img.height, img.width):
        raise ArgumentError(
            f"max_offset {max_offset} must be < min(H, W) = "
            f"{min(img.height, img.width)}"
        )
    dx = rng.randint(rng.derive_stream(seed, "spatial_shift", "dx"),
                     -max_offset, max_offset)
    dy = rng.randint(rng.derive_stream(seed, "spatial_shift", "dy"),
                     -max_offset, max_offset)
    if dx == 0 and dy == 0:
        return img, 0, 0
    ys = np.clip(np.arange(img.height) - dy, 0, img.height - 1)
    xs = np.clip(np.arange(img.width) - dx, 0, img.width - 1)
    return Image(img.data[np.ix_(ys, xs)]), dx, dy


def temporal_shift_rs(
    seq: FrameSequence,
    window: ExposureSchedule,
    delta_range: tuple[int, int],
    seed: int,
) -> tuple[Image, int]:
    """Rolling-shutter readout delayed by delta ~ U[lo, hi] frames."""
    lo, hi = delta_range
    if lo > hi or lo < 0:
        raise ArgumentError(f"bad delta range [{lo}, {hi}]")
    if window.window_start + hi + window.exposure_len > len(seq):
        raise BoundsError(
            f"delayed window needs {window.window_start + hi + window.exposure_len} "
            f"frames, sequence has {len(seq)}"
        )
    delta = rng.randint(rng.derive_stream(seed, "temporal_shift"), lo, hi)
    shifted = ExposureSchedule(
        window.exposure_len, window.deadtime_len, window.window_start + delta
    )
    return rs_synthesize(seq, shifted), delta


def _poisson_from_uniform(lam: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Poisson counts from per-element means and uniforms, deterministically.

    Means <= POISSON_NORMAL_CUTOVER invert the CDF; the accumulation is
    started at lam - 12*sqrt(lam) - 20 (left tail < 1e-30) so the running
    pmf never underflows.  Larger means use the normal quantile rounded to
    the nearest count.
    """
    out = np.zeros(lam.shape, dtype=np.float64)
    big = lam > POISSON_NORMAL_CUTOVER
    if big.any():
        lb = lam[big]
        out[big] = np.maximum(0.0, np.rint(lb + np.sqrt(lb) * ndtri(u[big])))
    small = ~big
    if small.any():
        ls = lam[small]
        us = u[small]
        positive = ls > 0.0
        safe = np.where(positive, ls, 1.0)
        k_lo = np.maximum(0.0, np.floor(ls - 12.0 * np.sqrt(ls) - 20.0))
        log_p = k_lo * np.log(safe) - ls - gammaln(k_lo + 1.0)
        p = np.where(positive, np.exp(log_p), 1.0)
        cdf = p.copy()
        res = k_lo + (us >= cdf)
        k_hi = np.ceil(ls + 12.0 * np.sqrt(ls) + 20.0)
        steps = int((k_hi - k_lo).max())
        for j in range(1, steps + 1):
            k = k_lo + j
            p *= safe / k
            cdf += p
            res += us >= cdf
        res[~positive] = 0.0
        out[small] = res
    return out


def low_light(
    img: Image,
    peak: float,
    gamma_range: tuple[float, float] = DEFAULT_GAMMA_RANGE,
    seed: int = 0,
) -> Image:
    """Low-light simulation: random gamma, then Poisson shot noise.

    gamma ~ U[g_lo, g_hi]; output is Poisson(img**gamma * peak) / peak,
    clamped to [0, 1].  Noise is applied post-gamma.
    """
    g_lo, g_hi = gamma_range
    if peak <= 0:
        raise ArgumentError(f"peak must be > 0, got {peak}")
    if not 0 < g_lo <= g_hi:
        raise ArgumentError(f"gamma range invalid: [{g_lo}, {g_hi}]")
    gamma = g_lo + rng.uniform(rng.derive_stream(seed, "low_light", "gamma")) * (
        g_hi - g_lo
    )
    base = np.clip(img.data.astype(np.float64), 0.0, 1.0)
    lam = np.power(base, gamma) * peak
    u = rng.uniform_array(
        rng.derive_stream(seed, "low_light", "u"), lam.size
    ).reshape(lam.shape)
    counts = _poisson_from_uniform(lam, u)
    return Image(np.clip(counts / peak, 0.0, 1.0).astype(np.float32))


def stereo_shift(img: Image, disparity: MaskMap, d_up: float) -> Image:
    """Backward-warp horizontally by d_up * disparity (bilinear, edge clamp)."""
    if disparity.data.shape != (img.height, img.width):
        raise ShapeError(
            f"disparity {disparity.data.shape} does not match image "
            f"{(img.height, img.width)}"
        )
    if d_up < 0:
        raise ArgumentError(f"d_up must be >= 0, got {d_up}")
    if d_up == 0:
        return img
    ygrid, xgrid = np.mgrid[0 : img.height, 0 : img.width].astype(np.float64)
    xs = xgrid + float(d_up) * disparity.data.astype(np.float64)
    return Image(bilinear_sample(img.data, xs, ygrid).astype(np.float32))
