"""Regenerate the bundled synthetic hardware config.

Builds a 15x7 grid (105 qubits) with 182 working-topology couplers
(188 grid edges minus 6 removed, connectivity preserved), one dead qubit,
two working but T1-suppressed qubits, and calibration values whose
working-element means are rescaled to exactly:

    e1 = 1.0e-3    e2 = 4.4e-3    e3 = 1.3e-2

Run from the repository root:

    python tools/gen_sample_config.py
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

ROWS, COLS = 15, 7
DEAD_QUBIT = 38
SUPPRESSED = (17, 86)  # working, but with strongly suppressed T1
REMOVE_EDGES = 6
TARGETS = {"e1": 1.0e-3, "e2": 4.4e-3, "e3": 1.3e-2}
OUT = Path(__file__).resolve().parents[1] / "src" / "rcsbench" / "data" / "tianyan287-like.json"


def qid(r: int, c: int) -> int:
    return r * COLS + c


def grid_edges() -> list[tuple[int, int]]:
    edges = []
    for r in range(ROWS):
        for c in range(COLS):
            if c + 1 < COLS:
                edges.append((qid(r, c), qid(r, c + 1)))
            if r + 1 < ROWS:
                edges.append((qid(r, c), qid(r + 1, c)))
    return edges


def connected(n: int, edges: list[tuple[int, int]]) -> bool:
    adj: dict[int, list[int]] = {i: [] for i in range(n)}
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    seen = {0}
    stack = [0]
    while stack:
        for nb in adj[stack.pop()]:
            if nb not in seen:
                seen.add(nb)
                stack.append(nb)
    return len(seen) == n


def rescale(values: np.ndarray, mask: np.ndarray, target: float) -> np.ndarray:
    """Scale so the mean over ``mask`` equals ``target`` exactly."""
    out = values * (target / values[mask].mean())
    if out.max() >= 1.0:
        raise RuntimeError("rescaled error rate left [0, 1)")
    return out


def main() -> None:
    gen = np.random.Generator(np.random.Philox(20260814))
    n = ROWS * COLS

    edges = grid_edges()
    assert len(edges) == 188
    while True:
        drop_idx = set(gen.choice(len(edges), size=REMOVE_EDGES, replace=False).tolist())
        kept = [e for i, e in enumerate(edges) if i not in drop_idx]
        if connected(n, kept):
            break
    assert len(kept) == 182

    q_working = np.ones(n, dtype=bool)
    q_working[DEAD_QUBIT] = False

    # Lognormal-ish spreads around the target means, clipped to sane ranges.
    e1 = np.clip(gen.lognormal(math.log(9.0e-4), 0.45, n), 1.5e-4, 8.0e-3)
    e3 = np.clip(gen.lognormal(math.log(1.2e-2), 0.35, n), 2.0e-3, 8.0e-2)
    e2 = np.clip(gen.lognormal(math.log(4.0e-3), 0.40, len(kept)), 8.0e-4, 3.0e-2)
    t1 = np.clip(gen.normal(44.4, 9.0, n), 12.0, 90.0)
    t2 = np.clip(gen.normal(41.1, 11.0, n), 6.0, 95.0)
    f01 = gen.uniform(4.15, 5.05, n)
    fsim_theta = gen.normal(math.pi / 2, 0.015, len(kept))
    fsim_phi = gen.normal(math.pi / 6, 0.02, len(kept))

    for q in SUPPRESSED:
        t1[q] = gen.uniform(5.5, 7.5)

    c_working = np.array([q_working[a] and q_working[b] for a, b in kept])

    e1 = rescale(e1, q_working, TARGETS["e1"])
    e3 = rescale(e3, q_working, TARGETS["e3"])
    e2 = rescale(e2, c_working, TARGETS["e2"])

    qubits = []
    for i in range(n):
        rec: dict = {"id": i, "row": i // COLS, "col": i % COLS, "working": bool(q_working[i])}
        if q_working[i]:
            rec.update(
                e1=float(e1[i]),
                e3=float(e3[i]),
                t1_us=round(float(t1[i]), 3),
                t2_us=round(float(t2[i]), 3),
                f01_ghz=round(float(f01[i]), 4),
                sq_gate_ns=26,
            )
        qubits.append(rec)

    couplers = []
    for j, (a, b) in enumerate(kept):
        rec = {"id": j, "q0": a, "q1": b, "working": bool(c_working[j])}
        if c_working[j]:
            rec.update(
                e2=float(e2[j]),
                fsim_theta=round(float(fsim_theta[j]), 6),
                fsim_phi=round(float(fsim_phi[j]), 6),
                tq_gate_ns=40,
            )
        couplers.append(rec)

    doc = {
        "name": "tianyan287-like",
        "rows": ROWS,
        "cols": COLS,
        "qubits": qubits,
        "couplers": couplers,
    }
    OUT.write_text(json.dumps(doc, indent=1) + "\n")

    works = [q for q in qubits if q["working"]]
    print(f"wrote {OUT}")
    print(f"qubits={len(qubits)} couplers={len(couplers)} working_qubits={len(works)}")
    print(f"mean e1={np.mean([q['e1'] for q in works]):.12g}")
    print(f"mean e3={np.mean([q['e3'] for q in works]):.12g}")
    print(f"mean e2={np.mean([c['e2'] for c in couplers if c['working']]):.12g}")
    print(f"mean t1={np.mean([q['t1_us'] for q in works]):.4g}")
    print(f"mean t2={np.mean([q['t2_us'] for q in works]):.4g}")


if __name__ == "__main__":
    main()
