"""Hardware topology and calibration data.

A machine is a square grid of qubits plus the couplers between
grid-adjacent pairs. Each element carries calibration values: single-qubit
and two-qubit Pauli error rates (``e1``, ``e2``), readout error (``e3``),
coherence times, idle frequency, and gate durations. Configs are single
JSON documents; loading validates the structural invariants and the model
is immutable afterwards.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from functools import cached_property
from pathlib import Path
from typing import Any

import numpy as np

SQ_GATE_NS_DEFAULT = 26.0
TQ_GATE_NS_DEFAULT = 40.0

#: Metrics accepted by :func:`error_summary`.
METRICS = ("e1", "e2", "e3", "t1", "t2")

_QUBIT_FIELDS = {
    "id": int,
    "row": int,
    "col": int,
    "working": bool,
    "e1": float,
    "e3": float,
    "t1_us": float,
    "t2_us": float,
    "f01_ghz": float,
    "sq_gate_ns": float,
}
_COUPLER_FIELDS = {
    "id": int,
    "q0": int,
    "q1": int,
    "working": bool,
    "e2": float,
    "fsim_theta": float,
    "fsim_phi": float,
    "tq_gate_ns": float,
}
_QUBIT_REQUIRED = ("id", "row", "col", "working")
_COUPLER_REQUIRED = ("id", "q0", "q1", "working")


class ConfigError(ValueError):
    """Config file unreadable or structurally malformed."""


class ConfigValidationError(ValueError):
    """Config parsed but violates model invariants."""

    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        super().__init__(
            "invalid hardware config:\n  " + "\n  ".join(self.violations)
        )


class EmptySelectionError(ValueError):
    """No working element carries the requested metric."""


@dataclass(frozen=True)
class QubitRecord:
    id: int
    row: int
    col: int
    working: bool
    e1: float | None = None
    e3: float | None = None
    t1_us: float | None = None
    t2_us: float | None = None
    f01_ghz: float | None = None
    sq_gate_ns: float = SQ_GATE_NS_DEFAULT
    extra: dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class CouplerRecord:
    id: int
    q0: int
    q1: int
    working: bool
    e2: float | None = None
    fsim_theta: float | None = None
    fsim_phi: float | None = None
    tq_gate_ns: float = TQ_GATE_NS_DEFAULT
    extra: dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class HardwareModel:
    """Immutable snapshot of one machine configuration."""

    name: str
    rows: int
    cols: int
    qubits: tuple[QubitRecord, ...]
    couplers: tuple[CouplerRecord, ...]
    extra: dict[str, Any] = field(default_factory=dict)

    @cached_property
    def _qubit_index(self) -> dict[int, QubitRecord]:
        return {q.id: q for q in self.qubits}

    @cached_property
    def _coupler_index(self) -> dict[tuple[int, int], CouplerRecord]:
        return {_pair_key(c.q0, c.q1): c for c in self.couplers}

    def qubit(self, qubit_id: int) -> QubitRecord:
        try:
            return self._qubit_index[int(qubit_id)]
        except KeyError:
            raise KeyError(f"no qubit with id {qubit_id}") from None

    def coupler_between(self, a: int, b: int) -> CouplerRecord | None:
        """The coupler joining qubits ``a`` and ``b``, or None."""
        return self._coupler_index.get(_pair_key(a, b))

    def working_qubits(self) -> tuple[QubitRecord, ...]:
        return tuple(q for q in self.qubits if q.working)

    def working_couplers(self) -> tuple[CouplerRecord, ...]:
        return tuple(c for c in self.couplers if c.working)


@dataclass(frozen=True)
class ErrorSummary:
    """Aggregate statistics of one metric over working elements."""

    metric: str
    mean: float
    median: float
    values: tuple[float, ...]  # ascending

    @property
    def cdf(self) -> tuple[tuple[float, float], ...]:
        """Empirical CDF points (value, fraction), fraction in (0, 1]."""
        n = len(self.values)
        return tuple((v, (i + 1) / n) for i, v in enumerate(self.values))


def _pair_key(a: int, b: int) -> tuple[int, int]:
    a, b = int(a), int(b)
    return (a, b) if a <= b else (b, a)


def _coerce_record(
    raw: dict[str, Any],
    fields: dict[str, type],
    required: tuple[str, ...],
    what: str,
) -> dict[str, Any]:
    if not isinstance(raw, dict):
        raise ConfigError(f"{what} entry must be a JSON object, got {type(raw).__name__}")
    out: dict[str, Any] = {"extra": {}}
    for key, value in raw.items():
        if key not in fields:
            out["extra"][key] = value
            continue
        typ = fields[key]
        if value is None:
            out[key] = None
            continue
        if typ is bool:
            if not isinstance(value, bool):
                raise ConfigError(f"{what} field {key!r} must be a boolean")
            out[key] = value
        elif typ is int:
            if isinstance(value, bool) or not isinstance(value, int):
                raise ConfigError(f"{what} field {key!r} must be an integer")
            out[key] = value
        else:
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ConfigError(f"{what} field {key!r} must be a number")
            out[key] = float(value)
    for key in required:
        if out.get(key) is None:
            raise ConfigError(f"{what} entry missing required field {key!r}: {raw!r}")
    return out


def _validate(model: HardwareModel) -> list[str]:
    bad: list[str] = []
    seen_ids: set[int] = set()
    seen_pos: dict[tuple[int, int], int] = {}
    for q in model.qubits:
        if q.id in seen_ids:
            bad.append(f"qubit {q.id}: duplicate id")
        seen_ids.add(q.id)
        pos = (q.row, q.col)
        if pos in seen_pos:
            bad.append(f"qubit {q.id}: grid position {pos} already used by qubit {seen_pos[pos]}")
        else:
            seen_pos[pos] = q.id
        if not (0 <= q.row < model.rows and 0 <= q.col < model.cols):
            bad.append(f"qubit {q.id}: position {pos} outside {model.rows}x{model.cols} grid")
        for name in ("e1", "e3"):
            v = getattr(q, name)
            if v is not None and not (0.0 <= v < 1.0):
                bad.append(f"qubit {q.id}: {name}={v} outside [0, 1)")
        for name in ("t1_us", "t2_us", "sq_gate_ns"):
            v = getattr(q, name)
            if v is not None and v <= 0:
                bad.append(f"qubit {q.id}: {name}={v} must be positive")

    qubits = {q.id: q for q in model.qubits}
    seen_cids: set[int] = set()
    seen_pairs: dict[tuple[int, int], int] = {}
    for c in model.couplers:
        if c.id in seen_cids:
            bad.append(f"coupler {c.id}: duplicate id")
        seen_cids.add(c.id)
        if c.q0 == c.q1:
            bad.append(f"coupler {c.id}: endpoints must differ")
            continue
        missing = [q for q in (c.q0, c.q1) if q not in qubits]
        if missing:
            bad.append(f"coupler {c.id}: unknown endpoint(s) {missing}")
            continue
        key = _pair_key(c.q0, c.q1)
        if key in seen_pairs:
            bad.append(f"coupler {c.id}: pair {key} already joined by coupler {seen_pairs[key]}")
        else:
            seen_pairs[key] = c.id
        a, b = qubits[c.q0], qubits[c.q1]
        if abs(a.row - b.row) + abs(a.col - b.col) != 1:
            bad.append(f"coupler {c.id}: endpoints {c.q0},{c.q1} are not grid-adjacent")
        if c.working and not (a.working and b.working):
            bad.append(f"coupler {c.id}: marked working but an endpoint qubit is not")
        if c.e2 is not None and not (0.0 <= c.e2 < 1.0):
            bad.append(f"coupler {c.id}: e2={c.e2} outside [0, 1)")
        if c.tq_gate_ns is not None and c.tq_gate_ns <= 0:
            bad.append(f"coupler {c.id}: tq_gate_ns={c.tq_gate_ns} must be positive")
    return bad


def model_from_dict(doc: dict[str, Any]) -> HardwareModel:
    """Build and validate a model from an already-parsed JSON document."""
    if not isinstance(doc, dict):
        raise ConfigError("config root must be a JSON object")
    extra = {k: v for k, v in doc.items() if k not in ("name", "rows", "cols", "qubits", "couplers")}
    for key in ("name", "rows", "cols", "qubits", "couplers"):
        if key not in doc:
            raise ConfigError(f"config missing required key {key!r}")
    if not isinstance(doc["qubits"], list) or not isinstance(doc["couplers"], list):
        raise ConfigError("config 'qubits' and 'couplers' must be arrays")
    qubits = tuple(
        QubitRecord(**{k: v for k, v in _coerce_record(raw, _QUBIT_FIELDS, _QUBIT_REQUIRED, "qubit").items() if v is not None or k in ("extra",)})
        for raw in doc["qubits"]
    )
    couplers = tuple(
        CouplerRecord(**{k: v for k, v in _coerce_record(raw, _COUPLER_FIELDS, _COUPLER_REQUIRED, "coupler").items() if v is not None or k in ("extra",)})
        for raw in doc["couplers"]
    )
    model = HardwareModel(
        name=str(doc["name"]),
        rows=int(doc["rows"]),
        cols=int(doc["cols"]),
        qubits=qubits,
        couplers=couplers,
        extra=extra,
    )
    violations = _validate(model)
    if violations:
        raise ConfigValidationError(violations)
    return model


def load_config(path: str | Path) -> HardwareModel:
    """Load, validate, and freeze a hardware config JSON file."""
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON ({exc})") from exc
    return model_from_dict(doc)


def model_to_dict(model: HardwareModel) -> dict[str, Any]:
    def qubit_doc(q: QubitRecord) -> dict[str, Any]:
        out: dict[str, Any] = {}
        for name in _QUBIT_FIELDS:
            v = getattr(q, name)
            if v is not None:
                out[name] = v
        out.update(q.extra)
        return out

    def coupler_doc(c: CouplerRecord) -> dict[str, Any]:
        out: dict[str, Any] = {}
        for name in _COUPLER_FIELDS:
            v = getattr(c, name)
            if v is not None:
                out[name] = v
        out.update(c.extra)
        return out

    doc: dict[str, Any] = {
        "name": model.name,
        "rows": model.rows,
        "cols": model.cols,
        "qubits": [qubit_doc(q) for q in model.qubits],
        "couplers": [coupler_doc(c) for c in model.couplers],
    }
    doc.update(model.extra)
    return doc


def save_config(model: HardwareModel, path: str | Path) -> None:
    Path(path).write_text(json.dumps(model_to_dict(model), indent=1) + "\n")


def exclude_qubits(model: HardwareModel, qubit_ids: set[int] | list[int]) -> HardwareModel:
    """A copy with the given qubits (and their couplers) marked non-working."""
    drop = {int(q) for q in qubit_ids}
    qubits = tuple(replace(q, working=False) if q.id in drop else q for q in model.qubits)
    couplers = tuple(
        replace(c, working=False) if (c.q0 in drop or c.q1 in drop) else c
        for c in model.couplers
    )
    return replace(model, qubits=qubits, couplers=couplers)


def error_summary(model: HardwareModel, metric: str) -> ErrorSummary:
    """Mean, median, and sorted CDF of one metric over working elements.

    Non-working elements are excluded; working elements that do not carry
    the metric are skipped. Raises :class:`EmptySelectionError` when
    nothing remains.
    """
    if metric not in METRICS:
        raise ValueError(f"unknown metric {metric!r}; expected one of {METRICS}")
    attr = {"e1": "e1", "e3": "e3", "t1": "t1_us", "t2": "t2_us"}.get(metric)
    if metric == "e2":
        values = [c.e2 for c in model.couplers if c.working and c.e2 is not None]
    else:
        values = [getattr(q, attr) for q in model.qubits if q.working and getattr(q, attr) is not None]
    if not values:
        raise EmptySelectionError(f"no working element carries metric {metric!r}")
    arr = np.sort(np.asarray(values, dtype=float))
    return ErrorSummary(
        metric=metric,
        mean=float(arr.mean()),
        median=float(np.median(arr)),
        values=tuple(float(v) for v in arr),
    )
