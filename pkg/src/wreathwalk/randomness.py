"""Reproducible random number streams.

All simulations use numpy's Philox4x64 counter-based generator.  A replica
stream is keyed by (master seed, replica index), so runs are bit-identical
across platforms and independent of how replicas are scheduled over
processes.
"""

from __future__ import annotations

import numpy as np

GENERATOR_NAME = "philox4x64"

_MASK64 = (1 << 64) - 1


def replica_generator(seed: int, replica: int = 0) -> np.random.Generator:
    """Stream for one replica: Philox keyed by (seed, replica)."""
    key = [int(seed) & _MASK64, int(replica) & _MASK64]
    return np.random.Generator(np.random.Philox(key=key))
