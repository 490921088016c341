"""Steps 3 and 4: execute a transpiled batch as a stored task.

The batch lands under ``task_root`` in the standard task-directory
layout (manifest.json, circuits/<k>.qc, mapping.json, config.json), and
everything after that -- sampling, XEB, fits, reports, export -- is the
core workflow operating on that directory.
"""

import json
from collections.abc import Mapping as MappingABC
from datetime import datetime, timezone
from pathlib import Path

import rcsbench as rb
from rcsbench.embedding import mapping_to_json
from rcsbench.workflow import (
    TaskStore,
    WorkflowError,
    export_task,
    fit_task,
    new_task_id,
    report_task,
    task_result,
    xeb_task,
)
from rcsbench.workflow import run_task as _run_native

from .mapping import TranspiledCircuit


def _now() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=1, sort_keys=True) + "\n")


def _config_bytes(config) -> bytes:
    # path-like configs are snapshotted byte-exactly, matching the native
    # transpile step; in-memory configs are serialized once here
    if isinstance(config, (str, Path)):
        return Path(config).read_bytes()
    if isinstance(config, rb.HardwareModel):
        config = rb.model_to_dict(config)
    if isinstance(config, dict):
        return (json.dumps(config, indent=1, sort_keys=True) + "\n").encode()
    raise WorkflowError(f"config must be a path, dict, or HardwareModel, got {type(config).__name__}")


def _first_pair(circuit: rb.Circuit) -> tuple[int, int]:
    for layer in circuit.layers:
        for gate in layer.gates:
            if gate.kind == "FSIM":
                a, b = sorted(gate.targets)
                return a, b
    raise WorkflowError("circuit has no two-qubit gate to optimize")


def run_task(
    config,
    transpiled_circuits: MappingABC[int, list],
    *,
    shots: int,
    seed: int = 0,
    backend: str = "ideal",
    fidelity: float | None = None,
    auto_opt: bool = False,
    opt_budget: int = 150,
    task_root: str | Path = "tasks",
    task_id: str | None = None,
) -> str:
    """Store a depth-keyed batch of transpiled circuits, sample, and analyze.

    Circuits are indexed depth-ascending, preserving list order within a
    depth; circuit ``k`` samples under its own seed derived from ``seed``.
    With ``auto_opt`` the fSim angles of each circuit's first coupler pair
    are refit against its own samples and stored alongside the XEB
    results. Returns the task id for ``supremacy_result`` and friends.
    """
    if not transpiled_circuits or any(not batch for batch in transpiled_circuits.values()):
        raise WorkflowError("transpiled_circuits must map each depth to a non-empty list")
    flat: list[tuple[int, int, TranspiledCircuit]] = []
    for depth in sorted(int(d) for d in transpiled_circuits):
        for instance, tc in enumerate(transpiled_circuits[depth]):
            if not isinstance(tc, TranspiledCircuit):
                raise WorkflowError(
                    f"depth {depth} entry {instance} is {type(tc).__name__}; transpile circuits first"
                )
            flat.append((depth, instance, tc))
    settings = {(tc.strategy, tc.budget, tc.use_calibrated_params) for _, _, tc in flat}
    if len(settings) > 1:
        raise WorkflowError("all circuits in one task must share transpile settings")
    strategy, budget, use_calibrated = next(iter(settings))

    config_bytes = _config_bytes(config)
    store = TaskStore(task_root)
    tid = task_id if task_id else new_task_id()
    task_dir = store.root / tid
    try:
        (task_dir / "circuits").mkdir(parents=True, exist_ok=False)
    except FileExistsError:
        raise WorkflowError(f"task {tid!r} already exists") from None

    (task_dir / "config.json").write_bytes(config_bytes)
    records = []
    placements = []
    for k, (depth, instance, tc) in enumerate(flat):
        rel = f"circuits/{k}.qc"
        (task_dir / rel).write_text(rb.serialize(tc.circuit))
        records.append({"index": k, "depth": depth, "instance": instance, "file": rel})
        placements.append({"index": k, **mapping_to_json(tc.mapping)})
    transpile_info = {
        "config": "config.json",
        "strategy": strategy,
        "budget": budget,
        "use_calibrated_params": use_calibrated,
    }
    _write_json(task_dir / "mapping.json", {**transpile_info, "circuits": placements})
    _write_json(
        task_dir / "manifest.json",
        {
            "task_id": tid,
            "status": "transpiled",
            "created_at": _now(),
            "transpile": transpile_info,
            "circuits": records,
        },
    )

    _run_native(store, tid, backend=backend, shots=shots, seed=seed, fidelity=fidelity)
    xeb_task(store, tid)
    if auto_opt:
        for k, (_, _, tc) in enumerate(flat):
            fit_task(store, tid, k, _first_pair(tc.circuit), budget=opt_budget, store_result=True)
    return tid


def supremacy_result(task_id: str, *, task_root: str | Path = "tasks") -> dict:
    """Finalize the task's numbers and return them.

    Recomputes XEB from the stored samples (idempotent, preserving stored
    fits), writes the report tables and plot, and returns the structured
    results document.
    """
    store = TaskStore(task_root)
    xeb_task(store, task_id)
    report_task(store, task_id)
    return task_result(store, task_id)


def download_data(task_id: str, file_name: str | Path | None = None, *, task_root: str | Path = "tasks") -> Path:
    """Pack the whole task directory into a zip archive."""
    return export_task(TaskStore(task_root), task_id, output=file_name)
