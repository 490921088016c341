"""File-backed task lifecycle: generate, transpile, run, post-process.

A task is a plain directory under the task root:

    <task_id>/manifest.json     status + layout + seeds + backend choice
    <task_id>/circuits/<k>.qc   one circuit per (depth, instance)
    <task_id>/config.json       byte-exact snapshot of the hardware config
    <task_id>/mapping.json      per-circuit logical->physical placements
    <task_id>/samples/<k>.txt   measured bitstrings per circuit
    <task_id>/results.json      XEB estimates, forecasts, stored fits
    <task_id>/report/           curve.csv, curve.svg, error_cdf.csv

Status moves forward only: created -> transpiled -> running -> done or
failed. Every file is written to a temp name and renamed, so a crash
leaves complete files plus a resumable status, never torn ones. One
writer at a time per task, enforced by a pid lock file. The manifest is
the only file carrying timestamps; everything else is a pure function of
(config, manifest, seeds), so reruns are byte-identical.
"""

from __future__ import annotations

import json
import os
import zipfile
from contextlib import contextmanager
from pathlib import Path
from time import gmtime, strftime
from typing import Iterator, Sequence

from . import noise, rng, sampleset, statevec, svgplot, tncost, xeb
from .circuit import (
    Circuit,
    DEFAULT_FSIM_PARAMS,
    DEFAULT_SEQUENCE,
    generate_rcs,
    grid_pattern_schedule,
    parse,
    serialize,
)
from .embedding import apply_mapping, embed, mapping_from_qubit_map, mapping_to_json
from .hwmodel import error_summary, load_config

STATUSES = ("created", "transpiled", "running", "done", "failed")
BACKENDS = ("ideal", "white-noise", "pauli-trajectory")

MANIFEST = "manifest.json"
CONFIG_SNAPSHOT = "config.json"
MAPPING_FILE = "mapping.json"
RESULTS_FILE = "results.json"
CIRCUITS_DIR = "circuits"
SAMPLES_DIR = "samples"
REPORT_DIR = "report"


class WorkflowError(Exception):
    """Base for task-store failures."""


class TaskNotFoundError(WorkflowError):
    pass


class StatusError(WorkflowError):
    """Operation not legal for the task's current status."""


class TaskFailedError(WorkflowError):
    """Task is (or just became) failed; carries the stored message."""


class LockError(WorkflowError):
    pass


def _now() -> str:
    return strftime("%Y-%m-%dT%H:%M:%SZ", gmtime())


def _write_bytes(path: Path, data: bytes) -> None:
    """Write-to-temp plus rename; readers never see partial files."""
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.parent / f".{path.name}.tmp{os.getpid()}"
    with open(tmp, "wb") as fh:
        fh.write(data)
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)


def _write_text(path: Path, text: str) -> None:
    _write_bytes(path, text.encode("utf-8"))


def _write_json(path: Path, obj) -> None:
    _write_text(path, json.dumps(obj, indent=1, sort_keys=True) + "\n")


def _read_json(path: Path):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def new_task_id() -> str:
    """Sortable timestamp plus six random hex characters."""
    return strftime("%Y%m%dT%H%M%S", gmtime()) + "-" + os.urandom(3).hex()


def _check_task_id(task_id: str) -> str:
    if not task_id or any(ch in task_id for ch in "/\\") or task_id.startswith("."):
        raise WorkflowError(f"illegal task id {task_id!r}")
    return task_id


def circuit_seed(seed: int, depth: int, instance: int) -> int:
    """Seed of the (depth, instance) circuit drawn under master ``seed``."""
    return rng.derive_seed(seed, 0, depth, instance)


def run_circuit_seed(seed: int, index: int) -> int:
    """Seed of circuit ``index``'s sampling under run master ``seed``."""
    return rng.derive_seed(seed, 1, index)


@contextmanager
def task_lock(task_dir: Path) -> Iterator[None]:
    """Exclusive pid lock; a lock left by a dead process is stolen."""
    lock = task_dir / ".lock"
    payload = json.dumps({"pid": os.getpid()}).encode()
    while True:
        try:
            fd = os.open(lock, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
            os.write(fd, payload)
            os.close(fd)
            break
        except FileExistsError:
            holder = None
            try:
                holder = int(json.loads(lock.read_text())["pid"])
            except (OSError, ValueError, KeyError, TypeError):
                pass
            alive = False
            if holder is not None:
                try:
                    os.kill(holder, 0)
                    alive = True
                except ProcessLookupError:
                    alive = False
                except PermissionError:
                    alive = True
            if alive:
                raise LockError(f"{task_dir.name} is locked by pid {holder}") from None
            lock.unlink(missing_ok=True)
    try:
        yield
    finally:
        lock.unlink(missing_ok=True)


class TaskStore:
    """Root directory holding one subdirectory per task."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def task_dir(self, task_id: str) -> Path:
        d = self.root / _check_task_id(task_id)
        if not (d / MANIFEST).is_file():
            raise TaskNotFoundError(f"no task {task_id!r} under {self.root}")
        return d

    def list_tasks(self) -> list[str]:
        return sorted(
            p.name for p in self.root.iterdir() if (p / MANIFEST).is_file()
        )

    def manifest(self, task_id: str) -> dict:
        return _read_json(self.task_dir(task_id) / MANIFEST)


def _save_manifest(task_dir: Path, man: dict) -> None:
    man["updated_at"] = _now()
    _write_json(task_dir / MANIFEST, man)


def _require_status(man: dict, allowed: tuple[str, ...]) -> None:
    if man["status"] not in allowed:
        raise StatusError(
            f"task {man['task_id']} is {man['status']!r}; "
            f"this step requires {' or '.join(repr(s) for s in allowed)}"
        )


def _circuit_path(task_dir: Path, rec: dict) -> Path:
    return task_dir / rec["file"]


def _load_circuit(task_dir: Path, rec: dict) -> Circuit:
    return parse(_circuit_path(task_dir, rec).read_text(encoding="utf-8"))


def gen_task(
    store: TaskStore,
    *,
    rows: int,
    cols: int,
    depths: Sequence[int],
    instances: int = 1,
    seed: int = 0,
    sequence: Sequence[str] = DEFAULT_SEQUENCE,
    allow_repeat: bool = False,
    fsim_params: tuple[float, float] = DEFAULT_FSIM_PARAMS,
    task_id: str | None = None,
) -> str:
    """Create a task directory with one circuit per (depth, instance)."""
    depths = sorted(set(int(d) for d in depths))
    if not depths or depths[0] < 1:
        raise WorkflowError("depths must be a non-empty list of positive cycle counts")
    if instances < 1:
        raise WorkflowError("instances must be >= 1")
    task_id = _check_task_id(task_id) if task_id else new_task_id()
    task_dir = store.root / task_id
    try:
        task_dir.mkdir(parents=True, exist_ok=False)
    except FileExistsError:
        raise WorkflowError(f"task {task_id!r} already exists") from None

    qubits, schedule = grid_pattern_schedule(rows, cols, sequence=tuple(sequence))
    records = []
    k = 0
    for depth in depths:
        for instance in range(instances):
            cseed = circuit_seed(seed, depth, instance)
            circ = generate_rcs(
                qubits,
                schedule,
                depth,
                cseed,
                allow_repeat=allow_repeat,
                fsim_params=fsim_params,
            )
            rel = f"{CIRCUITS_DIR}/{k}.qc"
            _write_text(task_dir / rel, serialize(circ))
            records.append(
                {"index": k, "depth": depth, "instance": instance, "file": rel, "seed": cseed}
            )
            k += 1

    man = {
        "task_id": task_id,
        "status": "created",
        "created_at": _now(),
        "seed": int(seed),
        "layout": {
            "rows": int(rows),
            "cols": int(cols),
            "sequence": list(sequence),
            "allow_repeat": bool(allow_repeat),
            "fsim_params": [float(fsim_params[0]), float(fsim_params[1])],
        },
        "circuits": records,
    }
    _save_manifest(task_dir, man)
    return task_id


def transpile_task(
    store: TaskStore,
    task_id: str,
    config_path: str | Path,
    *,
    strategy: str = "best",
    budget: int = 200_000,
    identity: bool = False,
    use_calibrated_params: bool = False,
) -> dict:
    """Place every circuit on the hardware and rewrite it onto physical labels.

    The config is snapshotted byte-exactly into the task directory; the
    per-circuit placements land in mapping.json. Circuits sharing a gate
    census reuse one placement search.
    """
    task_dir = store.task_dir(task_id)
    with task_lock(task_dir):
        man = _read_json(task_dir / MANIFEST)
        _require_status(man, ("created",))
        config_bytes = Path(config_path).read_bytes()
        model = load_config(config_path)
        _write_bytes(task_dir / CONFIG_SNAPSHOT, config_bytes)

        cache: dict[tuple, object] = {}
        circuit_records = []
        for rec in man["circuits"]:
            circ = _load_circuit(task_dir, rec)
            if identity:
                mapping = mapping_from_qubit_map(circ, model, {q: q for q in circ.qubits})
            else:
                from .circuit import gate_census

                census = gate_census(circ)
                key = (
                    tuple(sorted(census.per_qubit.items())),
                    tuple(sorted(census.per_pair.items())),
                    tuple(sorted(census.measured)),
                )
                mapping = cache.get(key)
                if mapping is None:
                    mapping = embed(circ, model, strategy=strategy, budget=budget)
                    cache[key] = mapping
            phys = apply_mapping(
                circ, mapping, model, use_calibrated_params=use_calibrated_params
            )
            _write_text(_circuit_path(task_dir, rec), serialize(phys))
            circuit_records.append({"index": rec["index"], **mapping_to_json(mapping)})

        doc = {
            "strategy": "identity" if identity else strategy,
            "budget": int(budget),
            "use_calibrated_params": bool(use_calibrated_params),
            "config": CONFIG_SNAPSHOT,
            "circuits": circuit_records,
        }
        _write_json(task_dir / MAPPING_FILE, doc)
        man["transpile"] = {
            "config": CONFIG_SNAPSHOT,
            "strategy": doc["strategy"],
            "budget": doc["budget"],
            "use_calibrated_params": doc["use_calibrated_params"],
        }
        man["status"] = "transpiled"
        _save_manifest(task_dir, man)
        return doc


def _validate_backend(kind: str, shots: int, fidelity: float | None) -> dict:
    if kind not in BACKENDS:
        raise WorkflowError(f"unknown backend {kind!r}; expected one of {BACKENDS}")
    if shots < 1:
        raise WorkflowError("shots must be >= 1")
    spec: dict = {"kind": kind, "shots": int(shots)}
    if kind == "white-noise":
        if fidelity is None or not 0.0 <= fidelity <= 1.0:
            raise WorkflowError("white-noise backend needs fidelity in [0, 1]")
        spec["fidelity"] = float(fidelity)
    elif fidelity is not None:
        raise WorkflowError(f"backend {kind!r} takes no fidelity")
    return spec


def run_task(
    store: TaskStore,
    task_id: str,
    *,
    backend: str | None = None,
    shots: int | None = None,
    seed: int | None = None,
    fidelity: float | None = None,
) -> dict:
    """Sample every circuit on the chosen backend; resumable after a crash.

    A fresh run (status transpiled) records the backend choice in the
    manifest and moves to running; the manifest is immutable from then
    on. Resuming a running task reuses the recorded settings (passed
    settings, if any, must match) and recomputes only missing sample
    files. Circuit k always samples under its own derived seed, so
    resume order cannot change results.
    """
    task_dir = store.task_dir(task_id)
    with task_lock(task_dir):
        man = _read_json(task_dir / MANIFEST)
        _require_status(man, ("transpiled", "running"))
        if man["status"] == "transpiled":
            if backend is None or shots is None or seed is None:
                raise WorkflowError("a fresh run needs backend, shots, and seed")
            spec = _validate_backend(backend, shots, fidelity)
            spec["seed"] = int(seed)
            man["backend"] = spec
            man["status"] = "running"
            _save_manifest(task_dir, man)
        else:
            spec = man["backend"]
            given = {"kind": backend, "shots": shots, "seed": seed, "fidelity": fidelity}
            for field, value in given.items():
                if value is not None and spec.get(field) != value:
                    raise StatusError(
                        f"resume of {task_id} must reuse recorded {field}="
                        f"{spec.get(field)!r}, got {value!r}"
                    )

        model = None
        if spec["kind"] == "pauli-trajectory":
            model = load_config(task_dir / CONFIG_SNAPSHOT)
        try:
            for rec in man["circuits"]:
                out = task_dir / SAMPLES_DIR / f"{rec['index']}.txt"
                if out.is_file():
                    continue
                circ = _load_circuit(task_dir, rec)
                sub = run_circuit_seed(spec["seed"], rec["index"])
                if spec["kind"] == "ideal":
                    ss = statevec.sample(circ, spec["shots"], sub)
                elif spec["kind"] == "white-noise":
                    ss = noise.sample_white_noise(circ, spec["fidelity"], spec["shots"], sub)
                else:
                    ss = noise.sample_pauli_trajectories(
                        circ, model, shots=spec["shots"], seed=sub
                    )
                _write_text(out, sampleset.dumps(ss))
        except Exception as exc:
            man["failure"] = f"{type(exc).__name__}: {exc}"
            man["status"] = "failed"
            _save_manifest(task_dir, man)
            raise TaskFailedError(man["failure"]) from exc

        man["status"] = "done"
        _save_manifest(task_dir, man)
        return {"task_id": task_id, "status": "done", "circuits": len(man["circuits"])}


def xeb_task(store: TaskStore, task_id: str) -> dict:
    """Compute per-circuit and per-depth XEB plus fidelity forecasts.

    Requires a done task; writes results.json and returns its contents.
    Idempotent: recomputation from the stored samples yields identical
    bytes. Stored fit results, if any, are preserved.
    """
    task_dir = store.task_dir(task_id)
    with task_lock(task_dir):
        man = _read_json(task_dir / MANIFEST)
        _require_status(man, ("done",))
        model = load_config(task_dir / CONFIG_SNAPSHOT)

        by_depth: dict[int, list[tuple[Circuit, sampleset.SampleSet]]] = {}
        index_of: dict[int, list[int]] = {}
        forecasts: dict[int, noise.FidelityForecast] = {}
        for rec in man["circuits"]:
            circ = _load_circuit(task_dir, rec)
            ss = sampleset.load_samples(task_dir / SAMPLES_DIR / f"{rec['index']}.txt")
            by_depth.setdefault(rec["depth"], []).append((circ, ss))
            index_of.setdefault(rec["depth"], []).append(rec["index"])
            forecasts[rec["index"]] = noise.forecast_fidelity(circ, model)

        points = xeb.xeb_curve(by_depth)
        per_depth = []
        per_circuit = []
        for point in points:
            per_depth.append(
                {
                    "cycles": point.cycles,
                    "f_xeb": point.f_xeb,
                    "stderr": point.stderr,
                    "circuits": index_of[point.cycles],
                }
            )
            for k, est in zip(index_of[point.cycles], point.estimates):
                fc = forecasts[k]
                per_circuit.append(
                    {
                        "index": k,
                        "cycles": point.cycles,
                        "f_xeb": est.f_xeb,
                        "stderr": est.stderr,
                        "n_samples": est.n_samples,
                        "f_forecast": fc.f_est,
                        "forecast_breakdown": fc.breakdown,
                    }
                )
        per_circuit.sort(key=lambda r: r["index"])

        results = {
            "task_id": task_id,
            "backend": man["backend"],
            "per_depth": per_depth,
            "per_circuit": per_circuit,
        }
        results_path = task_dir / RESULTS_FILE
        if results_path.is_file():
            old = _read_json(results_path)
            if "fits" in old:
                results["fits"] = old["fits"]
        _write_json(results_path, results)
        return results


def fit_task(
    store: TaskStore,
    task_id: str,
    circuit_index: int,
    pair: tuple[int, int],
    *,
    init: tuple[float, float] | None = None,
    budget: int = 500,
    tol: float = 1e-3,
    store_result: bool = False,
) -> dict:
    """Refit one coupler's fSim angles against the stored samples.

    ``init`` defaults to the angles the stored circuit carries on that
    pair. With ``store_result`` the fit lands in results.json under
    ``fits["<k>:<a>-<b>"]``.
    """
    task_dir = store.task_dir(task_id)
    man = _read_json(task_dir / MANIFEST)
    _require_status(man, ("done",))
    recs = {rec["index"]: rec for rec in man["circuits"]}
    if circuit_index not in recs:
        raise WorkflowError(f"no circuit {circuit_index} in task {task_id}")
    circ = _load_circuit(task_dir, recs[circuit_index])
    ss = sampleset.load_samples(task_dir / SAMPLES_DIR / f"{circuit_index}.txt")
    a, b = sorted(int(q) for q in pair)
    if init is None:
        planted = [
            g.params
            for layer in circ.layers
            for g in layer.gates
            if g.kind == "FSIM" and g.targets == (a, b)
        ]
        if not planted:
            raise WorkflowError(f"circuit {circuit_index} has no FSIM on pair ({a}, {b})")
        init = planted[0]
    res = xeb.fit_fsim(ss, circ, (a, b), init, budget=budget, tol=tol)
    doc = {
        "index": circuit_index,
        "pair": [a, b],
        "theta": res.theta,
        "phi": res.phi,
        "objective": res.objective,
        "init": [float(init[0]), float(init[1])],
        "evaluations": len(res.trace),
        "trace": [[t, p, f] for t, p, f in res.trace],
    }
    if store_result:
        with task_lock(task_dir):
            results_path = task_dir / RESULTS_FILE
            if not results_path.is_file():
                raise StatusError(f"task {task_id} has no results.json; run xeb first")
            results = _read_json(results_path)
            results.setdefault("fits", {})[f"{circuit_index}:{a}-{b}"] = doc
            _write_json(results_path, results)
    return doc


def cost_task(
    store: TaskStore,
    task_id: str,
    circuit_index: int,
    *,
    scenario: str = "frontier-9.2PB",
    n_samples: int = 1,
    fidelity: float = 1.0,
    restarts: int = 8,
    seed: int = 0,
    bitstring: str | None = None,
    bytes_per_element: float = 8.0,
) -> dict:
    """Classical contraction cost of one stored circuit under a scenario."""
    task_dir = store.task_dir(task_id)
    man = _read_json(task_dir / MANIFEST)
    recs = {rec["index"]: rec for rec in man["circuits"]}
    if circuit_index not in recs:
        raise WorkflowError(f"no circuit {circuit_index} in task {task_id}")
    circ = _load_circuit(task_dir, recs[circuit_index])
    if scenario not in tncost.SCENARIOS:
        raise WorkflowError(
            f"unknown scenario {scenario!r}; have {sorted(tncost.SCENARIOS)}"
        )
    sc = tncost.SCENARIOS[scenario]
    bits = bitstring if bitstring is not None else "0" * circ.n_qubits
    net = tncost.build_network(circ, bits)
    cap = tncost.memory_cap_elements(sc.memory_petabytes, bytes_per_element)
    plan = tncost.plan_contraction(net, cap, seed=seed, restarts=restarts)
    report = tncost.cost_report(plan, n_samples, fidelity, sc)
    report["task_id"] = task_id
    report["circuit"] = circuit_index
    return report


def _csv_float(v: float) -> str:
    return repr(float(v))


def report_task(store: TaskStore, task_id: str) -> dict:
    """Emit curve.csv, curve.svg, and error_cdf.csv from stored results."""
    task_dir = store.task_dir(task_id)
    with task_lock(task_dir):
        man = _read_json(task_dir / MANIFEST)
        _require_status(man, ("done",))
        results_path = task_dir / RESULTS_FILE
        if not results_path.is_file():
            raise StatusError(f"task {task_id} has no results.json; run xeb first")
        results = _read_json(results_path)
        model = load_config(task_dir / CONFIG_SNAPSHOT)

        forecast_by_depth: dict[int, list[float]] = {}
        for row in results["per_circuit"]:
            forecast_by_depth.setdefault(row["cycles"], []).append(row["f_forecast"])

        lines = ["cycles,f_xeb,stderr,f_forecast"]
        cycles, f_meas, f_err, f_fore = [], [], [], []
        for row in results["per_depth"]:
            d = row["cycles"]
            fc = sum(forecast_by_depth[d]) / len(forecast_by_depth[d])
            lines.append(
                f"{d},{_csv_float(row['f_xeb'])},{_csv_float(row['stderr'])},{_csv_float(fc)}"
            )
            cycles.append(float(d))
            f_meas.append(row["f_xeb"])
            f_err.append(row["stderr"])
            f_fore.append(fc)
        _write_text(task_dir / REPORT_DIR / "curve.csv", "\n".join(lines) + "\n")

        positive = all(f - e > 0.0 for f, e in zip(f_meas, f_err)) and all(
            f > 0.0 for f in f_fore
        )
        svg = svgplot.render(
            [
                svgplot.Series("measured", cycles, f_meas, yerr=f_err),
                svgplot.Series("forecast", cycles, f_fore, marker=False, dashed=True),
            ],
            title=f"Linear XEB fidelity, task {task_id}",
            xlabel="cycles",
            ylabel="linear XEB fidelity",
            yscale="log" if positive else "linear",
        )
        _write_text(task_dir / REPORT_DIR / "curve.svg", svg)

        cdf_lines = ["metric,value,fraction"]
        for metric in ("e1", "e2", "e3"):
            summary = error_summary(model, metric)
            for value, fraction in summary.cdf:
                cdf_lines.append(f"{metric},{_csv_float(value)},{_csv_float(fraction)}")
        _write_text(task_dir / REPORT_DIR / "error_cdf.csv", "\n".join(cdf_lines) + "\n")

        base = task_dir / REPORT_DIR
        return {
            "curve_csv": str(base / "curve.csv"),
            "curve_svg": str(base / "curve.svg"),
            "error_cdf_csv": str(base / "error_cdf.csv"),
        }


def export_task(store: TaskStore, task_id: str, output: str | Path | None = None) -> Path:
    """Zip the task directory; fixed entry metadata, so reruns match bytes."""
    task_dir = store.task_dir(task_id)
    out = Path(output) if output is not None else store.root / f"{task_id}.zip"
    with task_lock(task_dir):
        rels = []
        for path in sorted(task_dir.rglob("*")):
            if not path.is_file():
                continue
            rel = path.relative_to(task_dir).as_posix()
            if rel == ".lock" or ".tmp" in path.name:
                continue
            rels.append(rel)
        tmp = out.parent / f".{out.name}.tmp{os.getpid()}"
        out.parent.mkdir(parents=True, exist_ok=True)
        with zipfile.ZipFile(tmp, "w", zipfile.ZIP_DEFLATED) as zf:
            for rel in rels:
                info = zipfile.ZipInfo(f"{task_id}/{rel}", date_time=(1980, 1, 1, 0, 0, 0))
                info.external_attr = 0o644 << 16
                info.compress_type = zipfile.ZIP_DEFLATED
                zf.writestr(info, (task_dir / rel).read_bytes())
        os.replace(tmp, out)
    return out


def task_result(store: TaskStore, task_id: str) -> dict:
    """Read-only structured results of a done task."""
    task_dir = store.task_dir(task_id)
    man = _read_json(task_dir / MANIFEST)
    if man["status"] == "failed":
        raise TaskFailedError(man.get("failure", "task failed"))
    _require_status(man, ("done",))
    results_path = task_dir / RESULTS_FILE
    if not results_path.is_file():
        raise StatusError(f"task {task_id} has no results.json; run xeb first")
    return _read_json(results_path)
