"""Named, order-independent random streams.

Every stochastic component draws from a generator keyed by an integer seed
plus a tuple of integers (stream domain, epoch, sample, ...). Streams with
different keys are statistically independent, so evaluation order never
changes results.
"""
import zlib

import numpy as np

# stream domains
TRAIN_NOISE = 1
TEST_NOISE = 2
FROZEN_NOISE = 3
TRAIN_BATCH = 4
TEST_BATCH = 5
RESAMPLED_BATCH = 6
LOCK_CHECK = 7


def stream(seed: int, *key: int) -> np.random.Generator:
    """Return a generator for ``(seed, key)``."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.default_rng(ss)


def derive_seed(master: int, name: str) -> int:
    """Derive a named child seed from a master seed."""
    ss = np.random.SeedSequence(int(master), spawn_key=(zlib.crc32(name.encode()),))
    return int(ss.generate_state(1, np.uint64)[0] >> np.uint64(1))
