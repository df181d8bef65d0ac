"""Array-interchange bindings over the shutterforge core.

Every callable delegates straight to the core library (no host-side
reimplementation), accepts contiguous float32 numpy arrays, and raises
TypeError/ValueError for dtype or shape problems before any core call.
Copies happen only for non-contiguous input.
"""

from . import losses, masks, metrics, perturb, synth
from .iterator import DatasetIterator

__version__ = "0.1.0"

__all__ = ["DatasetIterator", "losses", "masks", "metrics", "perturb", "synth"]
