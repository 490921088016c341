"""Seeded random streams.

All randomness in the package flows through one named, versioned,
counter-based generator (Philox keyed via SeedSequence) so that identical
seeds reproduce identical bytes across platforms and processes. Substreams
are addressed by an integer path, e.g. ``stream(seed, shot_index)`` for
per-shot noise trajectories.
"""

from __future__ import annotations

import numpy as np

# Bump the version suffix if the derivation scheme ever changes.
ALGORITHM = "philox4x64-seedseq-v1"

_MASK64 = (1 << 64) - 1


def _seed_sequence(seed: int, path: tuple[int, ...]) -> np.random.SeedSequence:
    return np.random.SeedSequence(
        entropy=int(seed) & _MASK64,
        spawn_key=tuple(int(p) & _MASK64 for p in path),
    )


def stream(seed: int, *path: int) -> np.random.Generator:
    """Return the generator for substream ``path`` of ``seed``.

    The same (seed, path) always yields the same stream; distinct paths
    yield statistically independent streams.
    """
    return np.random.Generator(np.random.Philox(_seed_sequence(seed, path)))


def derive_seed(seed: int, *path: int) -> int:
    """Fold (seed, path) into a fresh 64-bit integer seed."""
    return int(_seed_sequence(seed, path).generate_state(1, np.uint64)[0])
