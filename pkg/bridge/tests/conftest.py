import json
import math

import numpy as np
import pytest


def grid_config_doc(rows: int, cols: int, *, seed: int = 0, jitter: bool = True, name: str | None = None) -> dict:
    """Rectangular-grid device config; jittered rates make optima unique."""
    gen = np.random.default_rng(seed)

    def rate(lo, hi):
        return float(gen.uniform(lo, hi)) if jitter else (lo + hi) / 2.0

    qubits = []
    for r in range(rows):
        for c in range(cols):
            qubits.append(
                {
                    "id": r * cols + c,
                    "row": r,
                    "col": c,
                    "working": True,
                    "e1": rate(5e-4, 2e-3),
                    "e3": rate(8e-3, 2.5e-2),
                    "t1_us": rate(30.0, 60.0),
                    "t2_us": rate(25.0, 55.0),
                    "f01_ghz": rate(4.0, 5.0),
                    "sq_gate_ns": 25.0,
                }
            )
    couplers = []
    cid = 0
    for r in range(rows):
        for c in range(cols):
            q = r * cols + c
            if c + 1 < cols:
                couplers.append(
                    {
                        "id": cid,
                        "q0": q,
                        "q1": q + 1,
                        "working": True,
                        "e2": rate(3e-3, 8e-3),
                        "fsim_theta": math.pi / 2,
                        "fsim_phi": math.pi / 6,
                        "tq_gate_ns": 40.0,
                    }
                )
                cid += 1
            if r + 1 < rows:
                couplers.append(
                    {
                        "id": cid,
                        "q0": q,
                        "q1": q + cols,
                        "working": True,
                        "e2": rate(3e-3, 8e-3),
                        "fsim_theta": math.pi / 2,
                        "fsim_phi": math.pi / 6,
                        "tq_gate_ns": 40.0,
                    }
                )
                cid += 1
    return {
        "name": name or f"bridge-grid-{rows}x{cols}",
        "rows": rows,
        "cols": cols,
        "qubits": qubits,
        "couplers": couplers,
    }


@pytest.fixture
def write_config(tmp_path):
    def _write(rows: int, cols: int, *, seed: int = 0, jitter: bool = True):
        path = tmp_path / f"config_{rows}x{cols}_{seed}.json"
        doc = grid_config_doc(rows, cols, seed=seed, jitter=jitter)
        path.write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n")
        return path

    return _write
