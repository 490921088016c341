"""Measured bitstring collections and their on-disk text format.

A sample file is a header naming the measured qubits followed by one
bitstring per line; bit k of every line belongs to the k-th header label
(MSB first)::

    # qubits: Q3 Q7 Q11
    010
    110
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np


@dataclass(frozen=True, eq=False)
class SampleSet:
    """Bitstrings stored as basis-state indices over ``qubit_order``."""

    qubit_order: tuple[int, ...]
    data: np.ndarray  # uint64 indices; bit (n-1-k) of the index is qubit_order[k]

    def __post_init__(self):
        object.__setattr__(self, "qubit_order", tuple(int(q) for q in self.qubit_order))
        arr = np.ascontiguousarray(np.asarray(self.data, dtype=np.uint64))
        if arr.ndim != 1:
            raise ValueError("sample data must be one-dimensional")
        n = len(self.qubit_order)
        if n == 0 or len(set(self.qubit_order)) != n:
            raise ValueError("qubit_order must list distinct qubits")
        if n < 64 and arr.size and int(arr.max()) >= (1 << n):
            raise ValueError(f"sample index out of range for {n} qubits")
        object.__setattr__(self, "data", arr)

    @property
    def n_qubits(self) -> int:
        return len(self.qubit_order)

    @property
    def n_samples(self) -> int:
        return int(self.data.size)

    def counts(self) -> np.ndarray:
        """Occurrences of every basis state (dense; small n only)."""
        if self.n_qubits > 26:
            raise ValueError("dense counts limited to 26 qubits")
        return np.bincount(self.data.astype(np.int64), minlength=1 << self.n_qubits)

    def bitstrings(self) -> list[str]:
        n = self.n_qubits
        return [format(int(x), f"0{n}b") for x in self.data]

    def __eq__(self, other) -> bool:
        if not isinstance(other, SampleSet):
            return NotImplemented
        return self.qubit_order == other.qubit_order and np.array_equal(self.data, other.data)


def index_to_bitstring(index: int, n: int) -> str:
    return format(int(index), f"0{n}b")


def bitstring_to_index(bits: str) -> int:
    if not bits or any(b not in "01" for b in bits):
        raise ValueError(f"bitstring must be non-empty over {{0,1}}, got {bits!r}")
    return int(bits, 2)


def dumps(samples: SampleSet) -> str:
    header = "# qubits: " + " ".join(f"Q{q}" for q in samples.qubit_order)
    return "\n".join([header, *samples.bitstrings()]) + "\n"


def loads(text: str) -> SampleSet:
    qubit_order: tuple[int, ...] | None = None
    indices: list[int] = []
    n = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("qubits:") and qubit_order is None:
                labels = body[len("qubits:"):].split()
                parsed = []
                for tok in labels:
                    if not tok.startswith("Q") or not tok[1:].lstrip("-").isdigit():
                        raise ValueError(f"line {lineno}: bad qubit label {tok!r}")
                    parsed.append(int(tok[1:]))
                qubit_order = tuple(parsed)
                n = len(parsed)
            continue
        if qubit_order is None:
            raise ValueError(f"line {lineno}: bitstring before '# qubits:' header")
        if len(line) != n or any(b not in "01" for b in line):
            raise ValueError(f"line {lineno}: expected a {n}-bit string, got {line!r}")
        indices.append(int(line, 2))
    if qubit_order is None:
        raise ValueError("missing '# qubits:' header")
    return SampleSet(qubit_order, np.asarray(indices, dtype=np.uint64))


def save_samples(samples: SampleSet, path: str | Path) -> None:
    Path(path).write_text(dumps(samples))


def load_samples(path: str | Path) -> SampleSet:
    return loads(Path(path).read_text())
