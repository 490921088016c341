"""Error-aware placement of logical circuits onto hardware grids.

Embedding is subgraph isomorphism with a cost: the logical coupling graph
(FSIM pairs) must land injectively on working qubits joined by working
couplers, and the score to minimize is the usage-weighted negative log
survival

    score = sum_g count(g) * -ln(1 - e_g)

over single-qubit gates, two-qubit gates, and read-outs, so that
f_est = exp(-score) reproduces the product-form forecast. The search is
backtracking with a most-constrained-first order and branch-and-bound on
an admissible remaining-cost bound. No SWAP insertion: circuits whose
coupling graph is not a subgraph of the device simply do not embed.

Determinism: the budget counts search-node expansions, not wall-clock
time, and ties on score break toward the lexicographically smallest
physical-label sequence.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Mapping as TMapping

from .circuit import Circuit, Gate, Layer, gate_census
from .hwmodel import HardwareModel
from .noise import MappingError


class EmbeddingError(Exception):
    pass


class NoEmbeddingError(EmbeddingError):
    """Search space exhausted: no valid placement exists."""


class BudgetExhaustedError(EmbeddingError):
    """Expansion budget spent before any valid placement was found."""


@dataclass(frozen=True)
class Mapping:
    """An injective logical-to-physical placement and its score."""

    qubit_map: dict[int, int]
    pair_map: dict[tuple[int, int], int]  # logical pair -> coupler id
    score: float


def _neg_log_survival(e: float) -> float:
    return -math.log1p(-e)


def _qubit_cost(model: HardwareModel, usage: int, measured: bool, phys_id: int) -> float:
    q = model.qubit(phys_id)
    cost = 0.0
    if usage:
        if q.e1 is None:
            raise MappingError(f"qubit {q.id} carries no e1 calibration")
        cost += usage * _neg_log_survival(q.e1)
    if measured:
        if q.e3 is None:
            raise MappingError(f"qubit {q.id} carries no e3 calibration")
        cost += _neg_log_survival(q.e3)
    return cost


def score_of(
    census, model: HardwareModel, qubit_map: TMapping[int, int]
) -> float:
    """Recompute a mapping's score from census and model alone."""
    score = 0.0
    for logical, usage in census.per_qubit.items():
        score += usage * _neg_log_survival(_require_e1(model, qubit_map, logical))
    for logical in census.measured:
        q = model.qubit(qubit_map[logical])
        if q.e3 is None:
            raise MappingError(f"qubit {q.id} carries no e3 calibration")
        score += _neg_log_survival(q.e3)
    for pair, usage in census.per_pair.items():
        c = model.coupler_between(qubit_map[pair[0]], qubit_map[pair[1]])
        if c is None or not c.working or c.e2 is None:
            raise MappingError(f"logical pair {pair} lands on no usable coupler")
        score += usage * _neg_log_survival(c.e2)
    return score


def _require_e1(model, qubit_map, logical) -> float:
    q = model.qubit(qubit_map[logical])
    if q.e1 is None:
        raise MappingError(f"qubit {q.id} carries no e1 calibration")
    return q.e1


def embed(
    circuit: Circuit,
    model: HardwareModel,
    strategy: str = "best",
    budget: int = 200_000,
) -> Mapping:
    """Place the circuit on the model.

    ``strategy="first"`` returns the first valid placement found;
    ``"best"`` explores with branch-and-bound and returns the minimal
    score among all placements examined within ``budget`` expansions.
    Raises :class:`NoEmbeddingError` when exhaustive search proves no
    placement exists, :class:`BudgetExhaustedError` when the budget runs
    out with nothing found.
    """
    if strategy not in ("first", "best"):
        raise ValueError(f"strategy must be 'first' or 'best', got {strategy!r}")
    if budget < 1:
        raise ValueError("budget must be >= 1")
    census = gate_census(circuit)
    logical = list(circuit.qubits)
    measured = set(census.measured)
    usage = {q: census.per_qubit.get(q, 0) for q in logical}
    adj: dict[int, dict[int, int]] = {q: {} for q in logical}
    for (a, b), count in census.per_pair.items():
        adj[a][b] = count
        adj[b][a] = count

    working = [q.id for q in model.working_qubits()]
    if len(working) < len(logical):
        raise NoEmbeddingError(
            f"{len(logical)} logical qubits exceed {len(working)} working physical qubits"
        )
    phys_adj: dict[int, dict[int, float]] = {p: {} for p in working}
    min_edge_unit = math.inf
    for c in model.working_couplers():
        if c.e2 is None:
            continue
        unit = _neg_log_survival(c.e2)
        phys_adj[c.q0][c.q1] = unit
        phys_adj[c.q1][c.q0] = unit
        min_edge_unit = min(min_edge_unit, unit)

    qcost: dict[int, dict[int, float]] = {}
    for l in logical:
        row = {}
        for p in working:
            try:
                row[p] = _qubit_cost(model, usage[l], l in measured, p)
            except MappingError:
                continue  # uncalibrated qubit is unusable for this node
        if not row:
            raise NoEmbeddingError(f"no working qubit can host logical qubit {l}")
        qcost[l] = row
    min_qcost = {l: min(row.values()) for l, row in qcost.items()}

    # Most-constrained-first static order: start at the highest-degree
    # node, then grow by most placed-neighbors (ties: degree, label).
    order: list[int] = []
    placed_set: set[int] = set()
    remaining = set(logical)
    while remaining:
        if not order:
            pick = max(remaining, key=lambda q: (len(adj[q]), -q))
        else:
            pick = max(
                remaining,
                key=lambda q: (sum(1 for nb in adj[q] if nb in placed_set), len(adj[q]), -q),
            )
        order.append(pick)
        placed_set.add(pick)
        remaining.discard(pick)

    # Edge charged at the depth where its second endpoint is placed.
    depth_of = {q: i for i, q in enumerate(order)}
    edge_depth: list[tuple[int, int, int]] = []  # (depth, a, b)
    for (a, b), count in census.per_pair.items():
        edge_depth.append((max(depth_of[a], depth_of[b]), a, b))
    n_logical = len(order)
    rest_bound = [0.0] * (n_logical + 1)
    for d in range(n_logical - 1, -1, -1):
        node_term = min_qcost[order[d]]
        edge_term = sum(
            census.per_pair[(min(a, b), max(a, b))] * min_edge_unit
            for dd, a, b in edge_depth
            if dd == d
        )
        rest_bound[d] = rest_bound[d + 1] + node_term + edge_term
    if census.per_pair and not math.isfinite(min_edge_unit):
        raise NoEmbeddingError("model has no usable working coupler")

    assignment: dict[int, int] = {}
    used: set[int] = set()
    best_score = math.inf
    best_seq: tuple[int, ...] | None = None
    best_map: dict[int, int] | None = None
    expansions = 0
    budget_hit = False

    def candidates(l: int) -> list[int]:
        placed_nb = [nb for nb in adj[l] if nb in assignment]
        if placed_nb:
            pools = [set(phys_adj[assignment[nb]]) for nb in placed_nb]
            pool = set.intersection(*pools) - used
        else:
            pool = set(qcost[l]) - used
        need = len(adj[l])
        return sorted(p for p in pool if p in qcost[l] and len(phys_adj[p]) >= need)

    def extend(depth: int, score: float) -> None:
        nonlocal best_score, best_seq, best_map, expansions, budget_hit
        if budget_hit:
            return
        if depth == n_logical:
            seq = tuple(assignment[l] for l in sorted(assignment))
            if score < best_score or (score == best_score and (best_seq is None or seq < best_seq)):
                best_score = score
                best_seq = seq
                best_map = dict(assignment)
            return
        l = order[depth]
        placed_nb = [nb for nb in adj[l] if nb in assignment]
        cands = []
        for p in candidates(l):
            add = qcost[l][p]
            ok = True
            for nb in placed_nb:
                unit = phys_adj[p].get(assignment[nb])
                if unit is None:
                    ok = False
                    break
                add += adj[l][nb] * unit
            if ok:
                cands.append((add, p))
        cands.sort()
        for add, p in cands:
            expansions += 1
            if expansions > budget:
                budget_hit = True
                return
            new_score = score + add
            # new_score covers depths <= depth (this node plus edges back
            # into the placed set); rest_bound[depth+1] underestimates the
            # rest. Strict > keeps equal-score ties alive for the
            # lexicographic tie-break.
            if strategy == "best" and new_score + rest_bound[depth + 1] > best_score:
                continue
            assignment[l] = p
            used.add(p)
            extend(depth + 1, new_score)
            del assignment[l]
            used.discard(p)
            if strategy == "first" and best_map is not None:
                return

    extend(0, 0.0)

    if best_map is None:
        if budget_hit:
            raise BudgetExhaustedError(
                f"no placement found within {budget} expansions (search incomplete)"
            )
        raise NoEmbeddingError("exhaustive search found no valid placement")

    pair_map = {}
    for pair in census.per_pair:
        coupler = model.coupler_between(best_map[pair[0]], best_map[pair[1]])
        pair_map[pair] = coupler.id
    return Mapping(qubit_map=best_map, pair_map=pair_map, score=best_score)


def mapping_from_qubit_map(
    circuit: Circuit, model: HardwareModel, qubit_map: TMapping[int, int]
) -> Mapping:
    """Build a full Mapping (pairs and score) from a bare qubit map."""
    census = gate_census(circuit)
    images = [qubit_map.get(q) for q in circuit.qubits]
    if None in images or len(set(images)) != len(images):
        raise MappingError("qubit map must be injective over the circuit qubits")
    score = score_of(census, model, qubit_map)
    pair_map = {
        pair: model.coupler_between(qubit_map[pair[0]], qubit_map[pair[1]]).id
        for pair in census.per_pair
    }
    return Mapping(qubit_map=dict(qubit_map), pair_map=pair_map, score=score)


def apply_mapping(
    circuit: Circuit,
    mapping: Mapping,
    model: HardwareModel | None = None,
    *,
    use_calibrated_params: bool = False,
) -> Circuit:
    """Rewrite the circuit onto physical labels.

    With ``use_calibrated_params`` every FSIM takes the target coupler's
    calibrated (fsim_theta, fsim_phi); requires ``model``.
    """
    if use_calibrated_params and model is None:
        raise ValueError("use_calibrated_params requires the hardware model")
    qmap = mapping.qubit_map
    missing = [q for q in circuit.qubits if q not in qmap]
    if missing:
        raise MappingError(f"mapping missing logical qubits {missing}")
    layers = []
    for layer in circuit.layers:
        gates = []
        for g in layer.gates:
            targets = tuple(qmap[t] for t in g.targets)
            params = g.params
            if g.kind == "FSIM" and use_calibrated_params:
                coupler = model.coupler_between(*targets)
                if coupler is None or coupler.fsim_theta is None or coupler.fsim_phi is None:
                    raise MappingError(
                        f"no calibrated coupler for physical pair {tuple(sorted(targets))}"
                    )
                params = (coupler.fsim_theta, coupler.fsim_phi)
            gates.append(Gate(g.kind, targets, params))
        layers.append(Layer(layer.kind, tuple(gates)))
    return Circuit(tuple(qmap[q] for q in circuit.qubits), tuple(layers))


def mapping_to_json(mapping: Mapping) -> dict:
    return {
        "map": {str(l): p for l, p in sorted(mapping.qubit_map.items())},
        "pairs": {f"{a}-{b}": cid for (a, b), cid in sorted(mapping.pair_map.items())},
        "score": mapping.score,
    }


def mapping_from_json(doc: dict) -> Mapping:
    qubit_map = {int(k): int(v) for k, v in doc["map"].items()}
    pair_map = {}
    for key, cid in doc.get("pairs", {}).items():
        a, b = key.split("-")
        pair_map[(int(a), int(b))] = int(cid)
    return Mapping(qubit_map=qubit_map, pair_map=pair_map, score=float(doc["score"]))


def dumps_mapping(mapping: Mapping) -> str:
    return json.dumps(mapping_to_json(mapping), indent=1, sort_keys=True) + "\n"
