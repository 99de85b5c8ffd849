"""Seeding discipline: one master seed, deterministic child streams.

Every stochastic routine in the package draws from a counter-based Philox
generator. Child streams are derived from (master seed, path) where the path
is a tuple of small integers naming the unit of work, e.g. (pair_index,
restart_index). The derivation goes through numpy's SeedSequence spawn-key
mechanism, so parallel and serial execution see identical streams.
"""

from __future__ import annotations

import numpy as np

__all__ = ["seed_sequence", "generator", "child_seed"]


def seed_sequence(master_seed: int, *path: int) -> np.random.SeedSequence:
    """SeedSequence for a work unit addressed by (master_seed, *path)."""
    if master_seed < 0:
        raise ValueError(f"master seed must be nonnegative, got {master_seed}")
    return np.random.SeedSequence(master_seed, spawn_key=tuple(path))


def generator(master_seed: int, *path: int) -> np.random.Generator:
    """Philox generator for a work unit addressed by (master_seed, *path)."""
    return np.random.Generator(np.random.Philox(seed_sequence(master_seed, *path)))


def child_seed(master_seed: int, *path: int) -> int:
    """A 64-bit integer seed derived from (master_seed, *path).

    Used when a result row needs to record the exact seed of its unit.
    """
    return int(seed_sequence(master_seed, *path).generate_state(1, np.uint64)[0])
