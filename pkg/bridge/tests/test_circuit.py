"""Step-1 and step-2 bindings against the core library."""

import pytest

import rcsbench as rb
from rcsbench_bridge import setup_circuit_with_depth, transpile

# the printed batch-construction shape: four named patterns over ten
# qubits, a dict comprehension over depths
PATTERN_QUBITS = {
    "A": [(1, 4), (2, 5), (3, 6)],
    "B": [(5, 8), (6, 9), (7, 10)],
    "C": [(4, 8), (5, 9), (6, 10)],
    "D": [(1, 5), (2, 6), (3, 7)],
}
QUBITS = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10]


def test_batch_construction_shape():
    depths = [12, 16, 20, 24]
    repeat = 2
    circuits = {
        depth: [
            setup_circuit_with_depth(QUBITS, PATTERN_QUBITS, depth, seed=10 * depth + k)
            for k in range(repeat)
        ]
        for depth in depths
    }
    assert sum(len(v) for v in circuits.values()) == 8
    for depth, batch in circuits.items():
        for circ in batch:
            assert circ.n_qubits == 10
            # depth cycles of SINGLE+DOUBLE, one closing SINGLE, one MEASURE
            assert len(circ.layers) == 2 * depth + 2
            assert circ.layers[-1].kind == "MEASURE"
            assert circ.layers[-1].gates[0].targets == tuple(QUBITS)


def test_double_layers_follow_the_sequence():
    circ = setup_circuit_with_depth(QUBITS, PATTERN_QUBITS, 10, seed=3)
    fired = [
        tuple(sorted(g.targets) for g in layer.gates)
        for layer in circ.layers
        if layer.kind == "DOUBLE"
    ]
    order = ("A", "B", "C", "D", "C", "D", "A", "B")
    for k, pairs in enumerate(fired):
        want = sorted([sorted(p) for p in PATTERN_QUBITS[order[k % 8]]])
        assert sorted([list(p) for p in pairs]) == want, k


def test_same_seed_same_circuit():
    a = setup_circuit_with_depth(QUBITS, PATTERN_QUBITS, 8, seed=5)
    b = setup_circuit_with_depth(QUBITS, PATTERN_QUBITS, 8, seed=5)
    c = setup_circuit_with_depth(QUBITS, PATTERN_QUBITS, 8, seed=6)
    assert rb.serialize(a) == rb.serialize(b)
    assert rb.serialize(a) != rb.serialize(c)


def test_overlapping_pattern_rejected():
    bad = {"A": [(1, 2), (2, 3)]}
    with pytest.raises(rb.ScheduleError):
        setup_circuit_with_depth([1, 2, 3], bad, 4, seed=0, sequence=("A",))


def test_identity_transpile_is_a_no_op(write_config):
    config = write_config(4, 4, jitter=False)
    qubits, sched = rb.grid_pattern_schedule(4, 4)
    patterns = {k: list(v) for k, v in sched.patterns.items()}
    circ = setup_circuit_with_depth(qubits, patterns, 6, seed=11)
    tc = transpile(circ, config, strategy="identity")
    assert tc.circuit == circ
    assert tc.mapping.qubit_map == {q: q for q in qubits}
    assert rb.gate_census(tc.circuit) == rb.gate_census(circ)


def test_search_transpile_matches_direct_embed(write_config):
    config = write_config(3, 3, seed=42)
    qubits, sched = rb.grid_pattern_schedule(2, 2)
    circ = setup_circuit_with_depth(qubits, dict(sched.patterns), 4, seed=2)
    tc = transpile(circ, config, strategy="best")
    model = rb.load_config(config)
    direct = rb.embed(circ, model, strategy="best")
    assert tc.mapping.qubit_map == direct.qubit_map
    assert tc.mapping.score == direct.score
    assert tc.circuit == rb.apply_mapping(circ, direct, model)


def test_core_errors_pass_through(write_config):
    config = write_config(2, 2)
    circ = setup_circuit_with_depth([0, 1], {"A": [(0, 1)]}, 2, seed=0, sequence=("A",))
    with pytest.raises(ValueError, match="strategy"):
        transpile(circ, config, strategy="bogus")
    with pytest.raises(rb.ConfigError):
        transpile(circ, {"name": "broken"})
