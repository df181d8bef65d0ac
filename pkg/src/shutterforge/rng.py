"""Deterministic, order-independent random streams.

Every stochastic operation in the package draws from a counter-style
generator: a 64-bit stream key is derived from (seed, purpose labels) and
the value at counter ``i`` depends only on (key, i).  Outputs are therefore
identical regardless of evaluation order or parallelism degree, and stable
across runs on the same platform.
"""

from __future__ import annotations

import hashlib

import numpy as np

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


def derive_stream(seed: int, *labels: object) -> int:
    """Derive a 64-bit stream key from a seed and a sequence of labels.

    Labels may be strings or integers; they namespace independent draws
    (e.g. the dx and dy of a spatial shift) so streams never collide.
    """
    h = hashlib.blake2b(digest_size=8)
    h.update(int(seed & _MASK64).to_bytes(8, "little"))
    for label in labels:
        part = str(label).encode("utf-8")
        h.update(len(part).to_bytes(4, "little"))
        h.update(part)
    return int.from_bytes(h.digest(), "little")


def _mix64(z: int) -> int:
    z = z & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def raw64(stream: int, index: int = 0) -> int:
    """The ``index``-th 64-bit word of a stream (scalar path)."""
    return _mix64((stream + (index + 1) * _GAMMA) & _MASK64)


def uniform(stream: int, index: int = 0) -> float:
    """One f64 uniform in [0, 1) at the given counter position."""
    return (raw64(stream, index) >> 11) * 2.0**-53


def uniform_array(stream: int, count: int, offset: int = 0) -> np.ndarray:
    """Vectorized uniforms for counters offset .. offset+count-1."""
    idx = np.arange(offset + 1, offset + count + 1, dtype=np.uint64)
    z = (np.uint64(stream & _MASK64) + idx * np.uint64(_GAMMA))
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    z = z ^ (z >> np.uint64(31))
    return (z >> np.uint64(11)).astype(np.float64) * 2.0**-53


def randint(stream: int, lo: int, hi: int, index: int = 0) -> int:
    """Integer uniform on [lo, hi] inclusive.

    Uses a 64-bit modulo; the bias for the tiny ranges used here
    (|hi-lo| < 2**32) is below 2**-32 and irrelevant at desk scale.
    """
    if hi < lo:
        raise ValueError(f"empty integer range [{lo}, {hi}]")
    span = hi - lo + 1
    return lo + raw64(stream, index) % span


def permutation(stream: int, n: int) -> list[int]:
    """Seeded Fisher-Yates permutation of range(n)."""
    order = list(range(n))
    for i in range(n - 1, 0, -1):
        j = randint(stream, 0, i, index=i)
        order[i], order[j] = order[j], order[i]
    return order
