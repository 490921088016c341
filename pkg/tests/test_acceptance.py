"""End-to-end acceptance gate.

One test per headline guarantee: published-constant arithmetic, estimator
calibration, noise-model consistency, patch verification, output-statistics
shape, parameter recovery, placement optimality, contraction correctness,
and pipeline determinism. Fixtures are pinned by seed so every run checks
the same draw; tolerances are part of the contract and are not widened.
"""

import io
import json
import math
import subprocess
import sys
import time
import zipfile
from pathlib import Path

import numpy as np
import pytest
from scipy import stats

import rcsbench as rb
from rcsbench.embedding import NoEmbeddingError
from rcsbench.tncost import (
    SCENARIOS,
    build_network,
    contract_amplitude,
    estimate_runtime,
    plan_contraction,
)

from conftest import grid_model, grid_model_doc


def make_circuit(rows, cols, cycles, seed):
    qubits, sched = rb.grid_pattern_schedule(rows, cols)
    return rb.generate_rcs(qubits, sched, cycles, seed=seed)


def test_runtime_conversion_reproduces_published_years():
    start = time.monotonic()
    est = estimate_runtime(2.1e28, SCENARIOS["frontier-9.2PB"].profile)
    assert abs(est.years / 1.6e4 - 1.0) <= 0.02
    assert time.monotonic() - start < 1.0


def test_xeb_calibration_recovers_white_noise_fidelity():
    start = time.monotonic()
    circ = make_circuit(4, 4, 14, seed=19)
    probs, _ = rb.ideal_probabilities(circ)
    for fidelity, seed in zip((0.1, 0.3, 0.5, 1.0), (700, 701, 702, 703)):
        ss = rb.sample_white_noise(circ, fidelity, 100_000, seed=seed)
        est = rb.linear_xeb(ss, circ, probabilities=probs)
        assert abs(est.f_xeb - fidelity) <= 3.0 * est.stderr, (fidelity, est)
    assert time.monotonic() - start < 120.0


def test_trajectory_xeb_agrees_with_forecast():
    # 12-qubit, 12-cycle circuits at device-level error rates; the
    # trajectory estimate and the product-form forecast are independent
    # computations of the same fidelity
    start = time.monotonic()
    model = grid_model(3, 4)  # e1=1e-3, e2=4.4e-3, e3=1.3e-2
    fs = []
    forecast = None
    for k in range(8):
        circ = make_circuit(3, 4, 12, seed=400 + k)
        forecast = rb.forecast_fidelity(circ, model).f_est
        ss = rb.sample_pauli_trajectories(circ, model, shots=5000, seed=1800 + k)
        fs.append(rb.linear_xeb(ss, circ).f_xeb)
    measured = sum(fs) / len(fs)
    assert abs(measured / forecast - 1.0) <= 0.10
    assert time.monotonic() - start < 300.0


def test_patch_product_agrees_with_patched_forecast():
    model = grid_model(3, 4)
    left = (0, 1, 4, 5, 8, 9)
    right = (2, 3, 6, 7, 10, 11)
    products = []
    fc_patched = fc_full = None
    for k in range(60):
        circ = make_circuit(3, 4, 12, seed=400 + k)
        p1, p2 = rb.split_patches(circ, [left, right])
        fc_full = rb.forecast_fidelity(circ, model).f_est
        fc_patched = (
            rb.forecast_fidelity(p1, model).f_est * rb.forecast_fidelity(p2, model).f_est
        )
        s1 = rb.sample_pauli_trajectories(p1, model, shots=2000, seed=3000 + 2 * k)
        s2 = rb.sample_pauli_trajectories(p2, model, shots=2000, seed=3001 + 2 * k)
        products.append(rb.linear_xeb(s1, p1).f_xeb * rb.linear_xeb(s2, p2).f_xeb)
    product = sum(products) / len(products)
    assert abs(product / fc_patched - 1.0) <= 0.15
    # cutting cross-patch couplings can only raise the survival product
    assert fc_patched > fc_full


def test_porter_thomas_scaled_probabilities():
    start = time.monotonic()
    for seed in range(5):
        circ = make_circuit(4, 4, 12, seed=seed)
        p, _ = rb.ideal_probabilities(circ)
        ks = stats.kstest(p.size * p, "expon").statistic
        assert ks < 0.01, (seed, ks)
    assert time.monotonic() - start < 60.0


def test_fsim_plant_and_recover():
    start = time.monotonic()
    qubits, sched = rb.grid_pattern_schedule(3, 5)
    plants = np.random.default_rng(5)
    hits = 0
    for k in range(10):
        base = rb.generate_rcs(qubits, sched, 12, seed=200 + k)
        pair = next(
            tuple(sorted(g.targets))
            for layer in base.layers
            for g in layer.gates
            if g.kind == "FSIM"
        )
        theta = float(plants.uniform(0.0, math.pi))
        phi = float(plants.uniform(-math.pi, math.pi))
        planted = rb.replace_fsim_params(base, pair, theta, phi)
        ss = rb.sample(planted, 100_000, seed=900 + k)
        init = (
            min(max(theta + 0.25, 0.0), math.pi),
            min(max(phi - 0.35, -math.pi), math.pi),
        )
        res = rb.fit_fsim(ss, base, pair, init, budget=300)
        if abs(res.theta - theta) < 0.02 and abs(res.phi - phi) < 0.02:
            hits += 1
    assert hits >= 9, f"only {hits}/10 plants recovered"
    assert time.monotonic() - start < 120.0


# ---- embedding corpus: exhaustive reference search, written separately ----

_EDGES_4X4 = [
    (4 * r + c, 4 * r + c + 1) for r in range(4) for c in range(3)
] + [(4 * r + c, 4 * r + c + 4) for r in range(3) for c in range(4)]

_SHAPES = [(1, 3), (1, 4), (2, 2), (2, 3)]


def _corpus_case(i):
    gen = np.random.default_rng(1000 + i)
    if i % 8 == 7:
        # a dead centre qubit leaves no room for a 3x3 block
        shape = (3, 3)
        n_dead = 1 + int(gen.integers(0, 3))
        dead_q = tuple(gen.choice([5, 6, 9, 10], size=n_dead, replace=False).tolist())
        dead_c = ()
    else:
        shape = _SHAPES[i % len(_SHAPES)]
        dq, dc = [], []
        for _ in range(int(gen.integers(0, 4))):
            if gen.random() < 0.5:
                dq.append(int(gen.integers(0, 16)))
            else:
                dc.append(_EDGES_4X4[int(gen.integers(0, len(_EDGES_4X4)))])
        dead_q, dead_c = tuple(dq), tuple(dc)
    doc = grid_model_doc(4, 4, dead_qubits=dead_q, dead_couplers=dead_c)
    for q in doc["qubits"]:
        q["e1"] = float(gen.uniform(5e-4, 3e-3))
        q["e3"] = float(gen.uniform(5e-3, 3e-2))
    for c in doc["couplers"]:
        c["e2"] = float(gen.uniform(2e-3, 9e-3))
    return shape, doc


def _hand_census(circ):
    per_q, per_pair, measured = {}, {}, set()
    for layer in circ.layers:
        for g in layer.gates:
            if layer.kind == "SINGLE":
                per_q[g.targets[0]] = per_q.get(g.targets[0], 0) + 1
            elif layer.kind == "DOUBLE":
                a, b = sorted(g.targets)
                per_pair[(a, b)] = per_pair.get((a, b), 0) + 1
            else:
                measured.update(g.targets)
    return per_q, per_pair, measured


def _exhaustive_best_score(circ, doc):
    """Depth-first over all injective placements in plain label order."""
    per_q, per_pair, measured = _hand_census(circ)
    logical = sorted(circ.qubits)
    e1 = {q["id"]: q["e1"] for q in doc["qubits"] if q["working"]}
    e3 = {q["id"]: q["e3"] for q in doc["qubits"]}
    edge = {}
    for c in doc["couplers"]:
        if c["working"]:
            edge[frozenset((c["q0"], c["q1"]))] = c["e2"]
    nbrs = {l: [] for l in logical}
    for a, b in per_pair:
        nbrs[a].append(b)
        nbrs[b].append(a)
    best = [None]
    assign: dict[int, int] = {}
    used: set[int] = set()

    def rec(j):
        if j == len(logical):
            s = 0.0
            for q, cnt in per_q.items():
                s += cnt * -math.log1p(-e1[assign[q]])
            for q in measured:
                s += -math.log1p(-e3[assign[q]])
            for (a, b), cnt in per_pair.items():
                s += cnt * -math.log1p(-edge[frozenset((assign[a], assign[b]))])
            if best[0] is None or s < best[0]:
                best[0] = s
            return
        l = logical[j]
        for p in e1:
            if p in used:
                continue
            if any(
                nb in assign and frozenset((p, assign[nb])) not in edge
                for nb in nbrs[l]
            ):
                continue
            assign[l] = p
            used.add(p)
            rec(j + 1)
            del assign[l]
            used.discard(p)

    rec(0)
    return best[0]


def test_embedding_agrees_with_exhaustive_oracle():
    start = time.monotonic()
    n_infeasible = 0
    for i in range(100):
        shape, doc = _corpus_case(i)
        circ = make_circuit(*shape, 4, seed=3000 + i)
        want = _exhaustive_best_score(circ, doc)
        model = rb.model_from_dict(doc)
        try:
            got = rb.embed(circ, model, strategy="best")
        except NoEmbeddingError:
            assert want is None, f"case {i}: search gave up, oracle found {want}"
            n_infeasible += 1
        else:
            assert want is not None, f"case {i}: search placed an unplaceable circuit"
            assert abs(got.score - want) < 1e-12, (i, got.score, want)
    assert n_infeasible >= 5  # the corpus genuinely exercises non-existence
    assert time.monotonic() - start < 60.0


def test_tensor_amplitudes_agree_with_statevector():
    start = time.monotonic()
    shapes = [(1, 4), (2, 3), (2, 4), (3, 3), (2, 3), (3, 4), (2, 4), (3, 3), (4, 4), (4, 5)]
    for i in range(100):
        circ = make_circuit(*shapes[i % 10], 4 + (i % 5) * 2, seed=5000 + i)
        gen = np.random.default_rng(6000 + i)
        bits = "".join("01"[b] for b in gen.integers(0, 2, circ.n_qubits))
        want = rb.amplitude(circ, bits)
        net = build_network(circ, bits)
        free = plan_contraction(net, seed=0, restarts=4)
        capped = plan_contraction(net, max(16, free.peak_elements // 4), seed=0, restarts=4)
        assert abs(contract_amplitude(net, free) - want) < 1e-8, i
        assert abs(contract_amplitude(net, capped) - want) < 1e-8, i
    assert time.monotonic() - start < 300.0


def _run_pipeline(root: str, config: Path) -> None:
    base = [sys.executable, "-m", "rcsbench.cli"]
    steps = [
        ["gen", "--task-root", root, "--rows", "2", "--cols", "3", "--depths", "2,4",
         "--instances", "2", "--seed", "11", "--task-id", "det"],
        ["transpile", "det", "--task-root", root, "--config", str(config),
         "--strategy", "identity"],
        ["run", "det", "--task-root", root, "--backend", "ideal", "--shots", "200",
         "--seed", "3"],
        ["xeb", "det", "--task-root", root],
        ["fit", "det", "--task-root", root, "--circuit", "0", "--pair", "0,3",
         "--budget", "40", "--store"],
        ["cost", "det", "--task-root", root, "--circuit", "0", "--restarts", "2"],
        ["report", "det", "--task-root", root],
        ["export", "det", "--task-root", root],
    ]
    for step in steps:
        proc = subprocess.run(base + step, capture_output=True, text=True)
        assert proc.returncode == 0, (step, proc.stderr)


def _manifest_without_timestamps(raw: bytes) -> dict:
    doc = json.loads(raw)
    doc.pop("created_at")
    doc.pop("updated_at")
    return doc


def test_cli_pipeline_is_byte_deterministic(tmp_path):
    config = tmp_path / "config.json"
    config.write_text(json.dumps(grid_model_doc(2, 3), indent=1) + "\n")
    _run_pipeline(str(tmp_path / "a"), config)
    _run_pipeline(str(tmp_path / "b"), config)

    rel_a = sorted(
        p.relative_to(tmp_path / "a").as_posix()
        for p in (tmp_path / "a").rglob("*")
        if p.is_file()
    )
    rel_b = sorted(
        p.relative_to(tmp_path / "b").as_posix()
        for p in (tmp_path / "b").rglob("*")
        if p.is_file()
    )
    assert rel_a == rel_b
    for rel in rel_a:
        a = (tmp_path / "a" / rel).read_bytes()
        b = (tmp_path / "b" / rel).read_bytes()
        if rel.endswith("manifest.json"):
            assert _manifest_without_timestamps(a) == _manifest_without_timestamps(b)
        elif rel.endswith(".zip"):
            za, zb = zipfile.ZipFile(io.BytesIO(a)), zipfile.ZipFile(io.BytesIO(b))
            assert za.namelist() == zb.namelist()
            for name in za.namelist():
                if name.endswith("manifest.json"):
                    assert _manifest_without_timestamps(
                        za.read(name)
                    ) == _manifest_without_timestamps(zb.read(name))
                else:
                    assert za.read(name) == zb.read(name), name
        else:
            assert a == b, rel
