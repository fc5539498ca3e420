"""Deterministic seed derivation."""
import numpy as np


def derive_seed_sequence(seed: int, index: int) -> np.random.SeedSequence:
    """Child seed sequence for stream ``index``; a pure function of (seed, index)."""
    if seed < 0:
        raise ValueError("seed must be non-negative")
    return np.random.SeedSequence(entropy=seed, spawn_key=(index,))


def derive_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(derive_seed_sequence(seed, index))


def derive_seed(seed: int, index: int) -> int:
    """64-bit integer seed for stream ``index``."""
    state = derive_seed_sequence(seed, index).generate_state(1, dtype=np.uint64)
    return int(state[0])
