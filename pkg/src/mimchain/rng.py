"""Deterministic, order-independent random substreams.

Every stochastic operation in the package draws from a generator keyed by
the integers that identify the draw (seed, iteration, utterance index, ...).
Two calls with the same key tuple produce identical streams, so results do
not depend on evaluation order and are reproducible bit-for-bit.
"""

import numpy as np


def substream(*keys: int) -> np.random.Generator:
    """Return a fresh Generator keyed by a tuple of non-negative integers."""
    flat = []
    for k in keys:
        k = int(k)
        if k < 0:
            raise ValueError(f"substream keys must be non-negative, got {k}")
        flat.append(k)
    if not flat:
        raise ValueError("substream requires at least one key")
    return np.random.default_rng(flat)
