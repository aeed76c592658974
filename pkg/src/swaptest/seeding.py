"""Deterministic sub-seeds for replicates.

A sub-stream is ``SeedSequence(root_seed, spawn_key=(crc32(experiment),
*indices))``. numpy pins the SeedSequence hash, so the mapping from
``(root_seed, experiment, replicate, ...)`` to a stream does not depend on
how replicates are scheduled across workers.
"""
import zlib

import numpy as np


def _tag(experiment: str) -> int:
    return zlib.crc32(experiment.encode("utf-8"))


def seed_sequence(root_seed: int, experiment: str, *indices: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(int(root_seed), spawn_key=(_tag(experiment), *map(int, indices)))


def rng_for(root_seed: int, experiment: str, *indices: int) -> np.random.Generator:
    return np.random.default_rng(seed_sequence(root_seed, experiment, *indices))


def int_seed(root_seed: int, experiment: str, *indices: int) -> int:
    """A 63-bit integer seed, e.g. for the tie-breaking coins."""
    state = seed_sequence(root_seed, experiment, *indices).generate_state(1, np.uint64)[0]
    return int(state >> np.uint64(1))
