"""
Random stream derivation for reproducible Monte Carlo runs.

A run never shares a generator with another run. The stream for run
``i`` of phase ``p`` under master seed ``s`` is

    Generator(PCG64(SeedSequence(entropy=s, spawn_key=(p, i))))

so any partition of runs across workers draws exactly the same numbers.
"""

import numpy as np

# Phases keep S0 draws, S1 draws and the one-off channel draw apart.
PHASE_S0 = 0
PHASE_S1 = 1
PHASE_CHANNEL = 2

DEFAULT_SEED = 20100601

_U64_MASK = (1 << 64) - 1


def run_stream(seed: int, phase: int, run_index: int) -> np.random.Generator:
    """Return the generator for one run."""
    if seed < 0 or seed > _U64_MASK:
        raise ValueError(f"Seed must be an unsigned 64-bit integer, got {seed}")
    sequence = np.random.SeedSequence(entropy=seed, spawn_key=(phase, run_index))
    return np.random.Generator(np.random.PCG64(sequence))


def table_stream(seed: int, key: str) -> np.random.Generator:
    """Generator for sampling-based tables, keyed by a table identifier."""
    digest = [ord(ch) for ch in key]
    sequence = np.random.SeedSequence(entropy=seed, spawn_key=tuple(digest))
    return np.random.Generator(np.random.PCG64(sequence))
