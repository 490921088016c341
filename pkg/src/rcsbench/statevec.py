"""Exact state-vector simulation.

This is the ideal-probability oracle for everything downstream: XEB,
noise sampling, and tensor-network cross-checks. States live as rank-n
tensors of shape (2,)*n; axis k carries the k-th circuit qubit, so the
flattened index reads as an MSB-first bitstring over the circuit's qubit
order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import rng
from .circuit import Circuit, Gate, Layer, SINGLE_QUBIT_GATES, MEASURE
from .sampleset import SampleSet

MAX_QUBITS_DEFAULT = 26

_INV_SQRT2 = 1.0 / np.sqrt(2.0)
SQRT_X = _INV_SQRT2 * np.array([[1, -1j], [-1j, 1]], dtype=np.complex128)
SQRT_Y = _INV_SQRT2 * np.array([[1, -1], [1, 1]], dtype=np.complex128)
_W = np.exp(1j * np.pi / 4)
SQRT_W = _INV_SQRT2 * np.array([[1, -_W], [np.conj(_W), 1]], dtype=np.complex128)

GATES_1Q = {"SX": SQRT_X, "SY": SQRT_Y, "SW": SQRT_W}


class TooManyQubitsError(ValueError):
    """Circuit exceeds the state-vector qubit cap."""


def fsim_matrix(theta: float, phi: float) -> np.ndarray:
    """fSim(theta, phi) on basis (|00>, |01>, |10>, |11>).

    theta is the swap angle, phi the conditional phase;
    fsim(pi/2, 0) maps |01> to -i|10> (exact iSWAP up to that phase
    convention).
    """
    c, s = np.cos(theta), np.sin(theta)
    m = np.zeros((4, 4), dtype=np.complex128)
    m[0, 0] = 1.0
    m[1, 1] = c
    m[1, 2] = -1j * s
    m[2, 1] = -1j * s
    m[2, 2] = c
    m[3, 3] = np.exp(-1j * phi)
    return m


def gate_unitary(gate: Gate) -> np.ndarray:
    if gate.kind in SINGLE_QUBIT_GATES:
        return GATES_1Q[gate.kind]
    if gate.kind == "FSIM":
        return fsim_matrix(*gate.params)
    raise ValueError(f"gate {gate.kind} has no unitary")


def apply_1q(tensor: np.ndarray, u: np.ndarray, axis: int) -> np.ndarray:
    return np.moveaxis(np.tensordot(u, tensor, axes=(1, axis)), 0, axis)


def apply_2q(tensor: np.ndarray, u4: np.ndarray, axis_a: int, axis_b: int) -> np.ndarray:
    u = u4.reshape(2, 2, 2, 2)
    out = np.tensordot(u, tensor, axes=([2, 3], [axis_a, axis_b]))
    return np.moveaxis(out, [0, 1], [axis_a, axis_b])


def apply_layer(tensor: np.ndarray, layer: Layer, axis_of: dict[int, int]) -> np.ndarray:
    if layer.kind == MEASURE:
        return tensor
    for g in layer.gates:
        if g.kind == "FSIM":
            tensor = apply_2q(tensor, fsim_matrix(*g.params), axis_of[g.targets[0]], axis_of[g.targets[1]])
        else:
            tensor = apply_1q(tensor, GATES_1Q[g.kind], axis_of[g.targets[0]])
    return tensor


@dataclass
class StateVector:
    qubit_order: tuple[int, ...]
    amplitudes: np.ndarray  # flat, length 2**n, MSB-first over qubit_order

    @property
    def n(self) -> int:
        return len(self.qubit_order)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def index_of(self, bitstring) -> int:
        bits = _to_bits(bitstring, self.n)
        idx = 0
        for b in bits:
            idx = (idx << 1) | b
        return idx

    def amplitude_of(self, bitstring) -> complex:
        return complex(self.amplitudes[self.index_of(bitstring)])


def _to_bits(bitstring, n: int) -> list[int]:
    if isinstance(bitstring, str):
        bits = [int(b) for b in bitstring if not b.isspace()]
    else:
        bits = [int(b) for b in bitstring]
    if len(bits) != n or any(b not in (0, 1) for b in bits):
        raise ValueError(f"expected a {n}-bit string over {{0,1}}")
    return bits


def simulate(circuit: Circuit, *, max_qubits: int = MAX_QUBITS_DEFAULT) -> StateVector:
    """Run the circuit on |0...0> and return the final state."""
    n = circuit.n_qubits
    if n > max_qubits:
        raise TooManyQubitsError(f"{n} qubits exceeds cap {max_qubits}")
    axis_of = {q: i for i, q in enumerate(circuit.qubits)}
    tensor = np.zeros((2,) * n, dtype=np.complex128)
    tensor[(0,) * n] = 1.0
    for layer in circuit.layers:
        tensor = apply_layer(tensor, layer, axis_of)
    return StateVector(circuit.qubits, tensor.reshape(-1))


def amplitude(circuit: Circuit, bitstring, *, max_qubits: int = MAX_QUBITS_DEFAULT) -> complex:
    """Output amplitude of one bitstring (MSB-first over circuit.qubits)."""
    sv = simulate(circuit, max_qubits=max_qubits)
    return sv.amplitude_of(bitstring)


def ideal_probabilities(
    circuit: Circuit, *, max_qubits: int = MAX_QUBITS_DEFAULT
) -> tuple[np.ndarray, tuple[int, ...]]:
    """Measured-marginal probabilities and the bit order they follow.

    Marginalizes over unmeasured qubits and reorders axes to the MEAS
    target order, which is the bit order of SampleSets.
    """
    sv = simulate(circuit, max_qubits=max_qubits)
    p = sv.probabilities()
    measured = circuit.measured_qubits
    if measured == sv.qubit_order:
        return p, measured
    n = sv.n
    axis_of = {q: i for i, q in enumerate(sv.qubit_order)}
    meas_axes = [axis_of[q] for q in measured]
    rest = [i for i in range(n) if i not in set(meas_axes)]
    pt = p.reshape((2,) * n).transpose(meas_axes + rest)
    return pt.reshape(1 << len(measured), -1).sum(axis=1), measured


def sample(
    circuit: Circuit, shots: int, seed: int, *, max_qubits: int = MAX_QUBITS_DEFAULT
) -> SampleSet:
    """Draw ideal measurement samples; deterministic for a given seed."""
    if shots < 1:
        raise ValueError("shots must be >= 1")
    p, order = ideal_probabilities(circuit, max_qubits=max_qubits)
    p = p / p.sum()
    gen = rng.stream(seed)
    idx = gen.choice(len(p), size=shots, p=p)
    return SampleSet(order, idx.astype(np.uint64))
