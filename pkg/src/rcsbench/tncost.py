"""Tensor-network amplitude contraction: planning, slicing, cost models.

A circuit maps to a closed network: one rank-1 tensor per input qubit
(|0>), one tensor per gate, and one rank-1 selector per output qubit
pinning the target bit, so the full contraction is the scalar amplitude.
Every bond has dimension 2 and joins exactly two tensors.

Planning is greedy pairwise contraction (minimize the size change of each
merge) with seeded randomized restarts; memory caps are met by slicing
the bond that most reduces peak intermediate size until the cap holds.

Cost model: one step's work is the product of the dimensions of the union
of its operands' indices, counted on the unsliced network, and the total
is multiplied by 2**(number of sliced bonds). Under this repetition model
adding a sliced bond exactly doubles the estimate for a fixed order; it
upper-bounds per-slice execution, which skips sliced dimensions inside
each step.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from itertools import product
from typing import Sequence

import numpy as np

from . import rng, statevec
from .circuit import Circuit, MEASURE, SINGLE_QUBIT_GATES

SECONDS_PER_YEAR = 3.156e7


@dataclass(frozen=True)
class Tensor:
    indices: tuple[str, ...]
    data: np.ndarray


@dataclass(frozen=True)
class TensorNetwork:
    tensors: tuple[Tensor, ...]

    @property
    def bonds(self) -> tuple[str, ...]:
        seen: dict[str, None] = {}
        for t in self.tensors:
            for ix in t.indices:
                seen.setdefault(ix)
        return tuple(seen)


@dataclass(frozen=True)
class ContractionPlan:
    """Pairwise contraction order in SSA form.

    Step k contracts tensor ids ``order[k]``; inputs are numbered
    0..T-1 and step k's output gets id T+k. ``flops_complex`` counts
    complex multiply-adds for one amplitude including the slice
    multiplier; ``peak_elements`` is the largest tensor held during one
    slice (sliced dimensions pinned).
    """

    order: tuple[tuple[int, int], ...]
    sliced_bonds: tuple[str, ...]
    flops_complex: int
    peak_elements: int


@dataclass(frozen=True)
class MachineProfile:
    peak_flops: float
    efficiency: float
    machine_flops_per_complex_op: float = 8.0


@dataclass(frozen=True)
class CostScenario:
    name: str
    profile: MachineProfile
    memory_petabytes: float


_FRONTIER = MachineProfile(peak_flops=1.685e18, efficiency=0.2, machine_flops_per_complex_op=8.0)

SCENARIOS = {
    "frontier-9.2PB": CostScenario("frontier-9.2PB", _FRONTIER, 9.2),
    "frontier-762.2PB": CostScenario("frontier-762.2PB", _FRONTIER, 762.2),
}


@dataclass(frozen=True)
class RuntimeEstimate:
    seconds: float
    years: float


def memory_cap_elements(petabytes: float, bytes_per_element: float = 8.0) -> int:
    """Elements fitting in ``petabytes`` (decimal PB; default complex64)."""
    if petabytes <= 0 or bytes_per_element <= 0:
        raise ValueError("memory sizes must be positive")
    return int(petabytes * 1e15 / bytes_per_element)


def build_network(circuit: Circuit, bitstring) -> TensorNetwork:
    """Closed network whose contraction is amplitude(circuit, bitstring).

    The bitstring follows the circuit's qubit order (first qubit = most
    significant bit), matching :func:`rcsbench.statevec.amplitude`.
    """
    bits = statevec._to_bits(bitstring, circuit.n_qubits)
    counter = 0

    def fresh() -> str:
        nonlocal counter
        counter += 1
        return f"w{counter}"

    current = {q: fresh() for q in circuit.qubits}
    ket = np.array([1.0, 0.0], dtype=np.complex128)
    tensors = [Tensor((current[q],), ket) for q in circuit.qubits]

    for layer in circuit.layers:
        if layer.kind == MEASURE:
            continue
        for g in layer.gates:
            if g.kind in SINGLE_QUBIT_GATES:
                q = g.targets[0]
                w_in, w_out = current[q], fresh()
                tensors.append(Tensor((w_out, w_in), statevec.GATES_1Q[g.kind]))
                current[q] = w_out
            else:
                a, b = g.targets
                wa, wb = current[a], current[b]
                oa, ob = fresh(), fresh()
                u = statevec.fsim_matrix(*g.params).reshape(2, 2, 2, 2)
                tensors.append(Tensor((oa, ob, wa, wb), u))
                current[a], current[b] = oa, ob

    for q, bit in zip(circuit.qubits, bits):
        sel = np.zeros(2, dtype=np.complex128)
        sel[bit] = 1.0
        tensors.append(Tensor((current[q],), sel))
    return TensorNetwork(tuple(tensors))


def _index_masks(network: TensorNetwork) -> tuple[list[int], dict[str, int]]:
    """Bitmask per tensor over a global bond numbering."""
    bond_bit: dict[str, int] = {}
    for t in network.tensors:
        for ix in t.indices:
            if ix not in bond_bit:
                bond_bit[ix] = len(bond_bit)
    masks = []
    for t in network.tensors:
        m = 0
        for ix in t.indices:
            m |= 1 << bond_bit[ix]
        masks.append(m)
    return masks, bond_bit


def _step_masks(masks: Sequence[int], order: Sequence[tuple[int, int]]) -> list[int]:
    """Output mask of every step; validates the order contracts to a scalar.

    A bond always joins exactly two tensors, so a merged output is the
    symmetric difference of the operand masks.
    """
    alive: dict[int, int] = dict(enumerate(masks))
    next_id = len(masks)
    outs: list[int] = []
    for a, b in order:
        if a not in alive or b not in alive or a == b:
            raise ValueError(f"step ({a}, {b}) reuses or invents a tensor id")
        out = alive.pop(a) ^ alive.pop(b)
        outs.append(out)
        alive[next_id] = out
        next_id += 1
    if len(alive) != 1 or next(iter(alive.values())) != 0:
        raise ValueError("order does not contract the network to a scalar")
    return outs


def _order_cost(
    masks: Sequence[int], order: Sequence[tuple[int, int]], sliced_mask: int
) -> tuple[int, int]:
    alive: dict[int, int] = dict(enumerate(masks))
    next_id = len(masks)
    flops = 0
    peak = 1
    for m in masks:
        peak = max(peak, 1 << (m & ~sliced_mask).bit_count())
    for a, b in order:
        ma, mb = alive.pop(a), alive.pop(b)
        flops += 1 << (ma | mb).bit_count()
        out = ma ^ mb
        peak = max(peak, 1 << (out & ~sliced_mask).bit_count())
        alive[next_id] = out
        next_id += 1
    return flops << sliced_mask.bit_count(), peak


def evaluate_plan(
    network: TensorNetwork,
    order: Sequence[tuple[int, int]],
    sliced_bonds: Sequence[str] = (),
) -> tuple[int, int]:
    """(flops_complex, peak_elements) of a fixed order and slice set.

    Per-step work is the full merged-index-set size; the multiplier
    2**len(sliced_bonds) is applied at the end, so each extra sliced
    bond exactly doubles the flops of the same order. Peak is per-slice.
    """
    masks, bond_bit = _index_masks(network)
    _step_masks(masks, order)
    sliced_mask = 0
    for name in sliced_bonds:
        if name not in bond_bit:
            raise ValueError(f"unknown bond {name!r}")
        sliced_mask |= 1 << bond_bit[name]
    return _order_cost(masks, order, sliced_mask)


def _greedy_order(
    masks: Sequence[int], gen: np.random.Generator | None
) -> list[tuple[int, int]]:
    """One greedy pairwise order over tensors given as index bitmasks.

    Candidate pairs share at least one bond; the key is the size change
    size(out) - size(a) - size(b), jittered when ``gen`` is given. Heap
    entries carry operand masks so stale ones are dropped lazily.
    Disconnected leftovers are folded by scalar multiplication steps.
    """
    alive: dict[int, int] = dict(enumerate(masks))
    next_id = len(masks)
    owners: dict[int, list[int]] = {}
    for tid, m in alive.items():
        b = m
        while b:
            low = b & -b
            owners.setdefault(low.bit_length() - 1, []).append(tid)
            b ^= low

    sigma = 0.0 if gen is None else float(2 ** (1 + int(gen.integers(0, 8))))

    def key(a: int, b: int) -> float:
        ma, mb = alive[a], alive[b]
        cost = (
            float(1 << (ma ^ mb).bit_count())
            - float(1 << ma.bit_count())
            - float(1 << mb.bit_count())
        )
        if sigma:
            cost += float(gen.normal(0.0, sigma))
        return cost

    heap: list[tuple[float, int, int, int, int, int]] = []
    tick = 0

    def push(a: int, b: int) -> None:
        nonlocal tick
        if a > b:
            a, b = b, a
        heapq.heappush(heap, (key(a, b), tick, a, b, alive[a], alive[b]))
        tick += 1

    seeded: set[tuple[int, int]] = set()
    for ids in owners.values():
        pair = (min(ids), max(ids))
        if pair not in seeded:
            seeded.add(pair)
            push(*pair)

    order: list[tuple[int, int]] = []
    while heap:
        _, _, a, b, ma, mb = heapq.heappop(heap)
        if alive.get(a) != ma or alive.get(b) != mb:
            continue  # stale
        out = ma ^ mb
        order.append((a, b))
        del alive[a], alive[b]
        oid = next_id
        next_id += 1
        alive[oid] = out
        neighbors: set[int] = set()
        bits = out
        while bits:
            low = bits & -bits
            ids = owners[low.bit_length() - 1]
            ids[:] = [oid if t in (a, b) else t for t in ids]
            for t in ids:
                if t != oid and t in alive:
                    neighbors.add(t)
            bits ^= low
        for t in sorted(neighbors):
            push(oid, t)

    rest = sorted(alive)
    while len(rest) > 1:
        a, b = rest[0], rest[1]
        order.append((a, b))
        merged = alive[a] ^ alive[b]
        del alive[a], alive[b]
        alive[next_id] = merged
        rest = sorted(rest[2:] + [next_id])
        next_id += 1
    return order


def _slice_for_cap(all_masks: Sequence[int], cap: int) -> int:
    """Bonds to slice (as a bitmask) so every pinned tensor fits the cap.

    Each round slices the bond giving the lexicographically best
    (new peak, count at peak); only bonds present in a current-peak
    tensor can lower it, so candidates are restricted to those.
    """

    def peak_count(s: int) -> tuple[int, int]:
        peak, cnt = 1, 0
        for m in all_masks:
            sz = 1 << (m & ~s).bit_count()
            if sz > peak:
                peak, cnt = sz, 1
            elif sz == peak:
                cnt += 1
        return peak, cnt

    sliced = 0
    peak, cnt = peak_count(sliced)
    while peak > cap:
        cand = 0
        for m in all_masks:
            free = m & ~sliced
            if (1 << free.bit_count()) == peak:
                cand |= free
        best: tuple[int, int, int] | None = None
        bits = cand
        while bits:
            low = bits & -bits
            bit = low.bit_length() - 1
            bits ^= low
            p, c = peak_count(sliced | (1 << bit))
            entry = (p, c, bit)
            if best is None or entry < best:
                best = entry
        if best is None or (best[0], best[1]) >= (peak, cnt):
            raise ValueError(f"slicing cannot reach memory cap {cap}")
        sliced |= 1 << best[2]
        peak, cnt = best[0], best[1]
    return sliced


def plan_contraction(
    network: TensorNetwork,
    memory_cap_elements: int | None = None,
    *,
    seed: int = 0,
    restarts: int = 64,
) -> ContractionPlan:
    """Search a contraction order; deterministic for fixed (seed, restarts).

    Restart 0 is the unjittered greedy order; the rest perturb the greedy
    key with seeded noise. The best (flops, peak) candidate wins.
    """
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    masks, bond_bit = _index_masks(network)
    cap: int | None = None
    if memory_cap_elements is not None:
        cap = int(memory_cap_elements)
        largest = max((1 << m.bit_count()) for m in masks) if masks else 1
        if cap < largest:
            raise ValueError(
                f"memory cap {cap} is below the largest input tensor ({largest} elements)"
            )

    best: tuple[tuple[int, int, int], list[tuple[int, int]], int] | None = None
    for r in range(restarts):
        gen = None if r == 0 else rng.stream(seed, r)
        order = _greedy_order(masks, gen)
        if cap is None:
            sliced = 0
        else:
            all_masks = list(masks) + _step_masks(masks, order)
            try:
                sliced = _slice_for_cap(all_masks, cap)
            except ValueError:
                continue
        flops, peak = _order_cost(masks, order, sliced)
        if best is None or (flops, peak, r) < best[0]:
            best = ((flops, peak, r), order, sliced)
    if best is None:
        raise ValueError(f"no contraction order satisfies memory cap {cap}")
    (flops, peak, _), order, sliced = best
    bit_name = {v: k for k, v in bond_bit.items()}
    names = tuple(sorted(bit_name[b] for b in range(len(bond_bit)) if sliced & (1 << b)))
    return ContractionPlan(
        order=tuple(order),
        sliced_bonds=names,
        flops_complex=flops,
        peak_elements=peak,
    )


def contract_amplitude(network: TensorNetwork, plan: ContractionPlan) -> complex:
    """Execute a plan, summing over sliced-bond assignments."""
    known = {ix for t in network.tensors for ix in t.indices}
    for name in plan.sliced_bonds:
        if name not in known:
            raise ValueError(f"sliced bond {name!r} not in network")
    total = 0.0 + 0.0j
    for assignment in product((0, 1), repeat=len(plan.sliced_bonds)):
        pin = dict(zip(plan.sliced_bonds, assignment))
        tensors: dict[int, tuple[tuple[str, ...], np.ndarray]] = {}
        for tid, t in enumerate(network.tensors):
            idx, arr = list(t.indices), t.data
            for ax in range(len(idx) - 1, -1, -1):
                if idx[ax] in pin:
                    arr = np.take(arr, pin[idx[ax]], axis=ax)
                    del idx[ax]
            tensors[tid] = (tuple(idx), np.asarray(arr))
        next_id = len(network.tensors)
        for a, b in plan.order:
            ia, ta = tensors.pop(a)
            ib, tb = tensors.pop(b)
            shared = [ix for ix in ia if ix in ib]
            out = np.tensordot(
                ta,
                tb,
                axes=([ia.index(ix) for ix in shared], [ib.index(ix) for ix in shared]),
            )
            out_idx = tuple(ix for ix in ia if ix not in shared) + tuple(
                ix for ix in ib if ix not in shared
            )
            tensors[next_id] = (out_idx, out)
            next_id += 1
        if len(tensors) != 1:
            raise ValueError("plan leaves the network unconnected")
        (idx, arr), = tensors.values()
        if idx:
            raise ValueError("plan leaves open indices")
        total += complex(arr)
    return total


def estimate_sampling_cost(plan: ContractionPlan, n_samples: int, fidelity: float) -> float:
    """Total complex flops to draw ``n_samples`` at target ``fidelity``.

    Frugal rejection sampling makes cost linear in fidelity: only a
    fraction F of the output strings need exact amplitudes. Simplified
    model; constant factors of production samplers are not reproduced.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    if not 0.0 < fidelity <= 1.0:
        raise ValueError("fidelity must lie in (0, 1]")
    return float(plan.flops_complex) * float(n_samples) * float(fidelity)


def estimate_runtime(total_complex_flops: float, profile: MachineProfile) -> RuntimeEstimate:
    """Wall time for a complex-op count on a machine profile."""
    if total_complex_flops < 0:
        raise ValueError("flops must be non-negative")
    if (
        profile.peak_flops <= 0
        or not 0.0 < profile.efficiency <= 1.0
        or profile.machine_flops_per_complex_op <= 0
    ):
        raise ValueError(
            "profile needs positive peak flops, efficiency in (0, 1], "
            "positive flops per complex op"
        )
    seconds = (
        total_complex_flops
        * profile.machine_flops_per_complex_op
        / (profile.peak_flops * profile.efficiency)
    )
    return RuntimeEstimate(seconds=seconds, years=seconds / SECONDS_PER_YEAR)


def cost_report(
    plan: ContractionPlan,
    n_samples: int,
    fidelity: float,
    scenario: CostScenario | str,
) -> dict:
    """JSON-ready cost summary for one plan under one machine scenario."""
    if isinstance(scenario, str):
        if scenario not in SCENARIOS:
            raise ValueError(f"unknown scenario {scenario!r}; have {sorted(SCENARIOS)}")
        scenario = SCENARIOS[scenario]
    total = estimate_sampling_cost(plan, n_samples, fidelity)
    rt = estimate_runtime(total, scenario.profile)
    return {
        "flops_complex": plan.flops_complex,
        "peak_elements": plan.peak_elements,
        "sliced_bonds": list(plan.sliced_bonds),
        "n_samples": int(n_samples),
        "fidelity": float(fidelity),
        "total_flops": total,
        "profile": {
            "name": scenario.name,
            "peak_flops": scenario.profile.peak_flops,
            "efficiency": scenario.profile.efficiency,
            "machine_flops_per_complex_op": scenario.profile.machine_flops_per_complex_op,
            "memory_petabytes": scenario.memory_petabytes,
        },
        "seconds": rt.seconds,
        "years": rt.years,
    }
