"""Step 1: build patterned random circuits from plain data."""

from collections.abc import Mapping, Sequence

from rcsbench import (
    DEFAULT_FSIM_PARAMS,
    DEFAULT_SEQUENCE,
    Circuit,
    PatternSchedule,
    generate_rcs,
)


def setup_circuit_with_depth(
    qubits: Sequence[int],
    pattern_qubits: Mapping[str, Sequence[Sequence[int]]],
    depth: int,
    *,
    seed: int = 0,
    sequence: Sequence[str] = DEFAULT_SEQUENCE,
    fsim_params: tuple[float, float] = DEFAULT_FSIM_PARAMS,
) -> Circuit:
    """One random circuit with ``depth`` cycles over the given patterns.

    ``pattern_qubits`` maps pattern names to disjoint qubit pairs, e.g.
    ``{'A': [(1, 4), (2, 5), (3, 6)], ...}``; ``sequence`` is the cyclic
    firing order of those names. Identical arguments and seed produce a
    byte-identical circuit, so batches are reproducible end to end.
    """
    patterns = {name: tuple((p[0], p[1]) for p in pairs) for name, pairs in pattern_qubits.items()}
    schedule = PatternSchedule(patterns, tuple(sequence))
    return generate_rcs(qubits, schedule, depth, seed, fsim_params=fsim_params)
