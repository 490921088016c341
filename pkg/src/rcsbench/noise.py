"""Discrete Pauli error model.

Three views of the same model, from cheapest to most faithful:

* :func:`forecast_fidelity` multiplies one survival factor per executed
  gate and per read-out qubit: f_est = prod(1-e1) * prod(1-e2) * prod(1-e3).
* :func:`sample_white_noise` draws each shot from the ideal distribution
  with probability F and uniformly otherwise, the global-depolarizing
  picture behind linear XEB.
* :func:`sample_pauli_trajectories` simulates per-shot error trajectories:
  after each gate a uniformly random non-identity Pauli fires on the
  gate's qubits with the gate's error probability, and measured bits flip
  independently with their read-out error.

Idle qubits accrue no error; only executed gates and measurements count.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from . import rng, statevec
from .circuit import Circuit, GateCensus, MEASURE, SINGLE_QUBIT_GATES, gate_census
from .hwmodel import HardwareModel
from .sampleset import SampleSet

_PREFIX_CACHE_BYTES = 256 * 1024 * 1024


class MappingError(ValueError):
    """Circuit cannot be laid onto the model through the given mapping."""


@dataclass(frozen=True)
class FidelityForecast:
    f_est: float
    breakdown: Mapping[str, float]  # keys: single_qubit, two_qubit, readout
    census: GateCensus


@dataclass(frozen=True)
class TrajectoryStats:
    n_shots: int
    clean_shots: int  # shots with no injected Pauli (readout flips not counted)
    pauli_events: int


def identity_mapping(circuit: Circuit) -> dict[int, int]:
    return {q: q for q in circuit.qubits}


def _resolve(circuit: Circuit, model: HardwareModel, mapping: Mapping[int, int]):
    """Per-gate error rates under the mapping; raises MappingError early."""
    census = gate_census(circuit)
    e1: dict[int, float] = {}
    e3: dict[int, float] = {}
    e2: dict[tuple[int, int], float] = {}

    def phys_qubit(logical: int):
        if logical not in mapping:
            raise MappingError(f"logical qubit {logical} is unmapped")
        try:
            q = model.qubit(mapping[logical])
        except KeyError as exc:
            raise MappingError(str(exc)) from None
        if not q.working:
            raise MappingError(f"logical qubit {logical} mapped to non-working qubit {q.id}")
        return q

    for logical in census.per_qubit:
        q = phys_qubit(logical)
        if q.e1 is None:
            raise MappingError(f"qubit {q.id} carries no e1 calibration")
        e1[logical] = q.e1
    for logical in census.measured:
        q = phys_qubit(logical)
        if q.e3 is None:
            raise MappingError(f"qubit {q.id} carries no e3 calibration")
        e3[logical] = q.e3
    for pair in census.per_pair:
        pa, pb = phys_qubit(pair[0]).id, phys_qubit(pair[1]).id
        coupler = model.coupler_between(pa, pb)
        if coupler is None:
            raise MappingError(f"no coupler joins physical qubits {pa},{pb} (logical pair {pair})")
        if not coupler.working:
            raise MappingError(f"coupler {coupler.id} for logical pair {pair} is not working")
        if coupler.e2 is None:
            raise MappingError(f"coupler {coupler.id} carries no e2 calibration")
        e2[pair] = coupler.e2
    return census, e1, e2, e3


def forecast_fidelity(
    circuit: Circuit, model: HardwareModel, mapping: Mapping[int, int] | None = None
) -> FidelityForecast:
    """Product-form fidelity estimate of the mapped circuit."""
    if mapping is None:
        mapping = identity_mapping(circuit)
    census, e1, e2, e3 = _resolve(circuit, model, mapping)
    single = 1.0
    for q, count in census.per_qubit.items():
        single *= (1.0 - e1[q]) ** count
    two = 1.0
    for pair, count in census.per_pair.items():
        two *= (1.0 - e2[pair]) ** count
    readout = 1.0
    for q in census.measured:
        readout *= 1.0 - e3[q]
    breakdown = {"single_qubit": single, "two_qubit": two, "readout": readout}
    return FidelityForecast(f_est=single * two * readout, breakdown=breakdown, census=census)


def sample_white_noise(
    circuit: Circuit,
    fidelity: float,
    shots: int,
    seed: int,
    *,
    max_qubits: int = statevec.MAX_QUBITS_DEFAULT,
) -> SampleSet:
    """Mix ideal samples (probability ``fidelity``) with uniform noise."""
    if not 0.0 <= fidelity <= 1.0:
        raise ValueError("fidelity must lie in [0, 1]")
    if shots < 1:
        raise ValueError("shots must be >= 1")
    p, order = statevec.ideal_probabilities(circuit, max_qubits=max_qubits)
    p = p / p.sum()
    d = len(p)
    gen = rng.stream(seed)
    use_ideal = gen.random(shots) < fidelity
    ideal_idx = gen.choice(d, size=shots, p=p)
    uniform_idx = gen.integers(0, d, size=shots)
    data = np.where(use_ideal, ideal_idx, uniform_idx).astype(np.uint64)
    return SampleSet(order, data)


_PAULI_1Q = (
    np.array([[0, 1], [1, 0]], dtype=np.complex128),
    np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    np.array([[1, 0], [0, -1]], dtype=np.complex128),
)
# The 15 non-identity two-qubit Paulis as (first, second) factor indices,
# 0 meaning identity on that factor.
_PAULI_2Q = tuple((i, j) for i in range(4) for j in range(4) if (i, j) != (0, 0))


def sample_pauli_trajectories(
    circuit: Circuit,
    model: HardwareModel,
    mapping: Mapping[int, int] | None = None,
    *,
    shots: int,
    seed: int,
    max_qubits: int = statevec.MAX_QUBITS_DEFAULT,
    with_stats: bool = False,
):
    """Per-shot stochastic Pauli trajectories plus read-out bit flips.

    Shot s uses substream (seed, s), so results are independent of shot
    execution order. Returns a SampleSet, or (SampleSet, TrajectoryStats)
    when ``with_stats`` is set.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    if mapping is None:
        mapping = identity_mapping(circuit)
    n = circuit.n_qubits
    if n > max_qubits:
        raise statevec.TooManyQubitsError(f"{n} qubits exceeds cap {max_qubits}")
    _, e1, e2, e3 = _resolve(circuit, model, mapping)
    axis_of = {q: i for i, q in enumerate(circuit.qubits)}

    # Flat gate table in execution order: (layer index, axes, error rate).
    gate_layer: list[int] = []
    gate_axes: list[tuple[int, ...]] = []
    gate_err: list[float] = []
    layers = [l for l in circuit.layers if l.kind != MEASURE]
    for li, layer in enumerate(layers):
        for g in layer.gates:
            if g.kind in SINGLE_QUBIT_GATES:
                gate_layer.append(li)
                gate_axes.append((axis_of[g.targets[0]],))
                gate_err.append(e1[g.targets[0]])
            else:
                gate_layer.append(li)
                gate_axes.append((axis_of[g.targets[0]], axis_of[g.targets[1]]))
                gate_err.append(e2[g.targets])
    err_vec = np.asarray(gate_err, dtype=float)
    n_gates = len(gate_err)

    measured = circuit.measured_qubits
    e3_vec = np.asarray([e3[q] for q in measured], dtype=float)
    n_meas = len(measured)
    full_measure = measured == circuit.qubits

    def marginal_probs(tensor: np.ndarray) -> np.ndarray:
        p = np.abs(tensor) ** 2
        if full_measure:
            return p.reshape(-1)
        meas_axes = [axis_of[q] for q in measured]
        rest = [i for i in range(n) if i not in set(meas_axes)]
        return p.transpose(meas_axes + rest).reshape(1 << n_meas, -1).sum(axis=1)

    # Ideal prefix states (state after each layer) let clean shots skip
    # simulation entirely and errored shots start at their first fault.
    cache_prefixes = (1 << n) * (len(layers) + 1) * 16 <= _PREFIX_CACHE_BYTES
    tensor = np.zeros((2,) * n, dtype=np.complex128)
    tensor[(0,) * n] = 1.0
    prefixes = [tensor]
    for layer in layers:
        tensor = statevec.apply_layer(tensor, layer, axis_of)
        if cache_prefixes:
            prefixes.append(tensor)
    ideal_p = marginal_probs(tensor)
    ideal_p = ideal_p / ideal_p.sum()
    d = 1 << n_meas

    flip_masks = (np.uint64(1) << np.arange(n_meas - 1, -1, -1, dtype=np.uint64))

    data = np.empty(shots, dtype=np.uint64)
    clean = 0
    pauli_events = 0
    for s in range(shots):
        gen = rng.stream(seed, s)
        fired = np.nonzero(gen.random(n_gates) < err_vec)[0] if n_gates else np.empty(0, int)
        if fired.size == 0:
            clean += 1
            idx = int(gen.choice(d, p=ideal_p))
        else:
            pauli_events += int(fired.size)
            paulis: dict[int, list[tuple[int, int]]] = {}
            for gi in fired:
                axes = gate_axes[gi]
                if len(axes) == 1:
                    paulis.setdefault(gi, []).append((axes[0], int(gen.integers(3))))
                else:
                    i, j = _PAULI_2Q[int(gen.integers(15))]
                    if i:
                        paulis.setdefault(gi, []).append((axes[0], i - 1))
                    if j:
                        paulis.setdefault(gi, []).append((axes[1], j - 1))
            first_layer = gate_layer[fired[0]]
            if cache_prefixes:
                state = prefixes[first_layer].copy()
                start = first_layer
            else:
                state = np.zeros((2,) * n, dtype=np.complex128)
                state[(0,) * n] = 1.0
                start = 0
            gi_by_layer: dict[int, list[int]] = {}
            for gi in fired:
                gi_by_layer.setdefault(gate_layer[gi], []).append(gi)
            for li in range(start, len(layers)):
                state = statevec.apply_layer(state, layers[li], axis_of)
                # Gates within a layer act on disjoint qubits, so a Pauli
                # injected right after its gate commutes to the layer end.
                for gi in gi_by_layer.get(li, ()):
                    for axis, p_idx in paulis[gi]:
                        state = statevec.apply_1q(state, _PAULI_1Q[p_idx], axis)
            p = marginal_probs(state)
            p = p / p.sum()
            idx = int(gen.choice(d, p=p))
        flips = gen.random(n_meas) < e3_vec
        if flips.any():
            idx = int(np.uint64(idx) ^ np.bitwise_xor.reduce(flip_masks[flips]))
        data[s] = idx

    samples = SampleSet(measured, data)
    if with_stats:
        return samples, TrajectoryStats(shots, clean, pauli_events)
    return samples
