"""Shared fixtures: bundled config path and synthetic grid models."""

import math
from pathlib import Path

import pytest

import rcsbench as rb

BUNDLED_CONFIG = Path(rb.__file__).parent / "data" / "tianyan287-like.json"


def grid_model_doc(
    rows: int,
    cols: int,
    *,
    e1: float = 1.0e-3,
    e2: float = 4.4e-3,
    e3: float = 1.3e-2,
    dead_qubits: tuple[int, ...] = (),
    dead_couplers: tuple[tuple[int, int], ...] = (),
    fsim_theta: float = math.pi / 2,
    fsim_phi: float = math.pi / 6,
    name: str = "test-grid",
) -> dict:
    """Uniform-rate rows x cols lattice config document (qubit id = r*cols + c)."""
    dead_q = set(dead_qubits)
    dead_c = {tuple(sorted(p)) for p in dead_couplers}
    qubits = []
    for r in range(rows):
        for c in range(cols):
            q = r * cols + c
            qubits.append(
                {
                    "id": q,
                    "row": r,
                    "col": c,
                    "working": q not in dead_q,
                    "e1": e1,
                    "e3": e3,
                    "t1_us": 44.4,
                    "t2_us": 41.1,
                }
            )
    couplers = []
    cid = 0
    for r in range(rows):
        for c in range(cols):
            q = r * cols + c
            for q2 in ((q + 1) if c + 1 < cols else None, (q + cols) if r + 1 < rows else None):
                if q2 is None:
                    continue
                working = (
                    q not in dead_q and q2 not in dead_q and (q, q2) not in dead_c
                )
                couplers.append(
                    {
                        "id": cid,
                        "q0": q,
                        "q1": q2,
                        "working": working,
                        "e2": e2,
                        "fsim_theta": fsim_theta,
                        "fsim_phi": fsim_phi,
                    }
                )
                cid += 1
    return {"name": name, "rows": rows, "cols": cols, "qubits": qubits, "couplers": couplers}


def grid_model(rows: int, cols: int, **kw) -> rb.HardwareModel:
    return rb.model_from_dict(grid_model_doc(rows, cols, **kw))


def first_fsim_pair(circuit: rb.Circuit) -> tuple[int, int]:
    for layer in circuit.layers:
        for g in layer.gates:
            if g.kind == "FSIM":
                return tuple(sorted(g.targets))
    raise AssertionError("circuit has no FSIM gate")


def fsim_pair_count(circuit: rb.Circuit, pair: tuple[int, int]) -> int:
    return sum(
        1
        for layer in circuit.layers
        for g in layer.gates
        if g.kind == "FSIM" and tuple(sorted(g.targets)) == tuple(sorted(pair))
    )


@pytest.fixture(scope="session")
def bundled_model() -> rb.HardwareModel:
    return rb.load_config(BUNDLED_CONFIG)
