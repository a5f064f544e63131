"""Deterministic random streams derived from one master seed.

Generator: NumPy PCG64. Every consumer of randomness (data generation,
parameter init, prototype init, batch sampling, triplet negatives) draws from
its own substream so that adding draws to one consumer never perturbs the
others. Substreams are derived from the master seed through a fixed key:

    PCG64(SeedSequence(entropy=master_seed, spawn_key=key))

with the named keys below. Identical (seed, key) always yields a bit-identical
stream.
"""

import numpy as np

# Fixed substream keys. Never renumber: doing so silently changes every
# generated dataset and training run.
STREAM_ID_DATA = 0
STREAM_AUX_DATA = 1
STREAM_TEST_OOD = 2
STREAM_PARAMS = 3
STREAM_PROTOTYPES = 4
STREAM_BATCHES = 5
STREAM_TRIPLETS = 6


def substream(master_seed: int, *key: int) -> np.random.Generator:
    """Return the PCG64 generator for one named substream of a master seed."""
    if master_seed < 0:
        raise ValueError(f"master seed must be non-negative, got {master_seed}")
    seq = np.random.SeedSequence(entropy=master_seed, spawn_key=tuple(key))
    return np.random.Generator(np.random.PCG64(seq))
