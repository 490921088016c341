"""Layered quantum circuits for random-circuit-sampling benchmarks.

A circuit is an ordered qubit list plus a sequence of layers. Layers are
SINGLE (one-qubit gates from {SX, SY, SW}), DOUBLE (two-qubit FSIM gates on
disjoint pairs), or MEASURE (a single MEAS covering the read-out qubits,
target order fixing the bit order). The patterned generator interleaves a
SINGLE layer before every DOUBLE layer and appends one final SINGLE layer
before MEASURE, so a ``cycles``-deep circuit has ``cycles + 1`` SINGLE
layers.

The text format is line oriented::

    # qubits: Q0 Q1 Q2
    SX Q0
    SY Q1
    ---
    FSIM Q0 Q1 1.5707963267948966e+00 5.2359877559829882e-01
    ---
    MEAS Q0 Q1 Q2

``---`` separates layers, ``#`` starts a comment, angles are decimal
radians with full float precision (17 significant digits). ``serialize``
is canonical: gates within a layer are sorted by ascending first target.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence

from . import rng

SINGLE_QUBIT_GATES = ("SX", "SY", "SW")
GATE_KINDS = ("SX", "SY", "SW", "FSIM", "MEAS")

SINGLE = "SINGLE"
DOUBLE = "DOUBLE"
MEASURE = "MEASURE"

DEFAULT_SEQUENCE = ("A", "B", "C", "D", "C", "D", "A", "B")
DEFAULT_FSIM_PARAMS = (math.pi / 2, math.pi / 6)


class CircuitError(ValueError):
    """Structural violation in a circuit, layer, or gate."""


class ScheduleError(CircuitError):
    """Invalid pattern schedule (non-disjoint pattern, unknown qubit, ...)."""


class CircuitSyntaxError(CircuitError):
    """Malformed circuit text."""

    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")


@dataclass(frozen=True)
class Gate:
    kind: str
    targets: tuple[int, ...]
    params: tuple[float, float] | None = None

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        if self.kind in SINGLE_QUBIT_GATES:
            if len(self.targets) != 1:
                raise CircuitError(f"{self.kind} takes exactly one target, got {self.targets}")
            if self.params is not None:
                raise CircuitError(f"{self.kind} takes no parameters")
        elif self.kind == "FSIM":
            if len(self.targets) != 2 or self.targets[0] == self.targets[1]:
                raise CircuitError(f"FSIM takes two distinct targets, got {self.targets}")
            if self.params is None or len(self.params) != 2:
                raise CircuitError("FSIM takes parameters (theta, phi)")
            # FSIM is symmetric under target exchange; canonicalize order.
            object.__setattr__(self, "targets", tuple(sorted(self.targets)))
            object.__setattr__(self, "params", (float(self.params[0]), float(self.params[1])))
        elif self.kind == "MEAS":
            if not self.targets or len(set(self.targets)) != len(self.targets):
                raise CircuitError(f"MEAS takes one or more distinct targets, got {self.targets}")
            if self.params is not None:
                raise CircuitError("MEAS takes no parameters")
        else:
            raise CircuitError(f"unknown gate kind {self.kind!r}")


_LAYER_KINDS_ALLOWED = {
    SINGLE: set(SINGLE_QUBIT_GATES),
    DOUBLE: {"FSIM"},
    MEASURE: {"MEAS"},
}


@dataclass(frozen=True)
class Layer:
    kind: str
    gates: tuple[Gate, ...]

    def __post_init__(self):
        if self.kind not in _LAYER_KINDS_ALLOWED:
            raise CircuitError(f"unknown layer kind {self.kind!r}")
        allowed = _LAYER_KINDS_ALLOWED[self.kind]
        gates = tuple(sorted(self.gates, key=lambda g: g.targets[0]))
        object.__setattr__(self, "gates", gates)
        seen: set[int] = set()
        for g in gates:
            if g.kind not in allowed:
                raise CircuitError(f"{g.kind} gate not allowed in {self.kind} layer")
            for t in g.targets:
                if t in seen:
                    raise CircuitError(f"qubit {t} targeted twice within one {self.kind} layer")
                seen.add(t)
        if self.kind == MEASURE and len(gates) != 1:
            raise CircuitError("MEASURE layer holds exactly one MEAS gate")

    @property
    def targets(self) -> set[int]:
        return {t for g in self.gates for t in g.targets}


@dataclass(frozen=True)
class Circuit:
    qubits: tuple[int, ...]
    layers: tuple[Layer, ...]

    def __post_init__(self):
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        object.__setattr__(self, "layers", tuple(self.layers))
        if len(set(self.qubits)) != len(self.qubits):
            raise CircuitError("duplicate qubit labels")
        qset = set(self.qubits)
        for i, layer in enumerate(self.layers):
            for t in layer.targets:
                if t not in qset:
                    raise CircuitError(f"layer {i} targets unknown qubit {t}")
            if layer.kind == MEASURE and i != len(self.layers) - 1:
                raise CircuitError("MEASURE layer must be last")
            if layer.kind == DOUBLE:
                if i == 0 or self.layers[i - 1].kind != SINGLE:
                    raise CircuitError(f"DOUBLE layer {i} not immediately preceded by a SINGLE layer")
            if layer.kind == SINGLE and not layer.gates:
                raise CircuitError(f"SINGLE layer {i} is empty")

    @property
    def n_qubits(self) -> int:
        return len(self.qubits)

    @property
    def cycles(self) -> int:
        """Number of DOUBLE layers."""
        return sum(1 for l in self.layers if l.kind == DOUBLE)

    @property
    def measured_qubits(self) -> tuple[int, ...]:
        """MEAS targets in measurement (bit) order; all qubits if unmeasured."""
        if self.layers and self.layers[-1].kind == MEASURE:
            return self.layers[-1].gates[0].targets
        return self.qubits


@dataclass(frozen=True)
class PatternSchedule:
    """Named coupler activation patterns and their cyclic firing order."""

    patterns: Mapping[str, tuple[tuple[int, int], ...]]
    sequence: tuple[str, ...] = DEFAULT_SEQUENCE

    def __post_init__(self):
        norm: dict[str, tuple[tuple[int, int], ...]] = {}
        for label, pairs in dict(self.patterns).items():
            seen: set[int] = set()
            out = []
            for pair in pairs:
                a, b = int(pair[0]), int(pair[1])
                if a == b:
                    raise ScheduleError(f"pattern {label!r}: pair ({a}, {b}) repeats a qubit")
                if a in seen or b in seen:
                    raise ScheduleError(f"pattern {label!r}: pairs are not disjoint at qubit {a if a in seen else b}")
                seen.update((a, b))
                out.append((a, b) if a < b else (b, a))
            norm[str(label)] = tuple(out)
        object.__setattr__(self, "patterns", norm)
        object.__setattr__(self, "sequence", tuple(str(s) for s in self.sequence))
        if not self.sequence:
            raise ScheduleError("sequence must not be empty")
        for label in self.sequence:
            if label not in norm:
                raise ScheduleError(f"sequence references unknown pattern {label!r}")

    def label_for(self, k: int) -> str:
        """Pattern label of the k-th DOUBLE layer (cyclic)."""
        return self.sequence[k % len(self.sequence)]

    def validate_over(self, qubits: Iterable[int]) -> None:
        qset = {int(q) for q in qubits}
        for label, pairs in self.patterns.items():
            for a, b in pairs:
                if a not in qset or b not in qset:
                    raise ScheduleError(
                        f"pattern {label!r} pair ({a}, {b}) references a qubit outside the circuit"
                    )


def grid_pattern_schedule(
    rows: int, cols: int, *, sequence: Sequence[str] = DEFAULT_SEQUENCE
) -> tuple[tuple[int, ...], PatternSchedule]:
    """Row-major grid labels plus the standard four-pattern tiling.

    A/B alternate vertical couplings (even/odd upper row), C/D alternate
    horizontal couplings (even/odd left column). Together the four patterns
    cover every grid edge exactly once.
    """
    if rows < 1 or cols < 1:
        raise ValueError("grid must be at least 1x1")
    label = lambda r, c: r * cols + c
    pat: dict[str, list[tuple[int, int]]] = {"A": [], "B": [], "C": [], "D": []}
    for r in range(rows - 1):
        for c in range(cols):
            pat["A" if r % 2 == 0 else "B"].append((label(r, c), label(r + 1, c)))
    for r in range(rows):
        for c in range(cols - 1):
            pat["C" if c % 2 == 0 else "D"].append((label(r, c), label(r, c + 1)))
    qubits = tuple(range(rows * cols))
    return qubits, PatternSchedule({k: tuple(v) for k, v in pat.items()}, tuple(sequence))


def generate_rcs(
    qubits: Sequence[int],
    schedule: PatternSchedule,
    cycles: int,
    seed: int,
    *,
    allow_repeat: bool = False,
    fsim_params: tuple[float, float] = DEFAULT_FSIM_PARAMS,
) -> Circuit:
    """Generate a patterned random circuit.

    Each cycle is a SINGLE layer (every qubit draws from {SX, SY, SW},
    by default never repeating its previous draw) followed by a DOUBLE
    layer firing ``schedule.label_for(k)``. A final SINGLE layer and a
    MEASURE over all qubits close the circuit. Byte-identical output for
    identical inputs and seed.
    """
    qubits = tuple(int(q) for q in qubits)
    if not qubits:
        raise CircuitError("qubit list must not be empty")
    if cycles < 1:
        raise CircuitError("cycles must be >= 1")
    schedule.validate_over(qubits)
    gen = rng.stream(seed)

    prev: dict[int, str | None] = {q: None for q in qubits}

    def single_layer() -> Layer:
        gates = []
        for q in qubits:
            if allow_repeat or prev[q] is None:
                kind = SINGLE_QUBIT_GATES[gen.integers(3)]
            else:
                options = [k for k in SINGLE_QUBIT_GATES if k != prev[q]]
                kind = options[gen.integers(2)]
            prev[q] = kind
            gates.append(Gate(kind, (q,)))
        return Layer(SINGLE, tuple(gates))

    theta, phi = float(fsim_params[0]), float(fsim_params[1])
    layers: list[Layer] = []
    for k in range(cycles):
        layers.append(single_layer())
        pairs = schedule.patterns[schedule.label_for(k)]
        layers.append(Layer(DOUBLE, tuple(Gate("FSIM", p, (theta, phi)) for p in pairs)))
    layers.append(single_layer())
    layers.append(Layer(MEASURE, (Gate("MEAS", qubits),)))
    return Circuit(qubits, tuple(layers))


def split_patches(circuit: Circuit, partition: Sequence[Iterable[int]]) -> list[Circuit]:
    """Cut the circuit into independent patches.

    ``partition`` must cover the circuit qubits exactly once with
    non-empty disjoint sets. Every FSIM whose endpoints land in different
    patches is deleted; single-qubit gates and intra-patch FSIMs are kept
    layer for layer, so each patch has the same layer count (cross-only
    DOUBLE layers become empty DOUBLE layers).
    """
    patches = [frozenset(int(q) for q in p) for p in partition]
    if any(not p for p in patches):
        raise CircuitError("partition contains an empty patch")
    flat: list[int] = [q for p in patches for q in p]
    if len(flat) != len(set(flat)):
        raise CircuitError("partition patches overlap")
    if set(flat) != set(circuit.qubits):
        raise CircuitError("partition must cover the circuit qubits exactly")

    out = []
    for patch in patches:
        order = tuple(q for q in circuit.qubits if q in patch)
        layers = []
        for layer in circuit.layers:
            if layer.kind == MEASURE:
                kept = tuple(t for t in layer.gates[0].targets if t in patch)
                if kept:
                    layers.append(Layer(MEASURE, (Gate("MEAS", kept),)))
                continue
            gates = tuple(g for g in layer.gates if all(t in patch for t in g.targets))
            layers.append(Layer(layer.kind, gates))
        out.append(Circuit(order, tuple(layers)))
    return out


@dataclass(frozen=True)
class GateCensus:
    """Gate usage counts, the shared currency of forecasting and embedding."""

    n_sq: int
    n_tq: int
    n_meas: int
    per_qubit: Mapping[int, int]
    per_pair: Mapping[tuple[int, int], int]
    measured: tuple[int, ...]


def gate_census(circuit: Circuit) -> GateCensus:
    per_qubit: dict[int, int] = {}
    per_pair: dict[tuple[int, int], int] = {}
    n_sq = n_tq = 0
    for layer in circuit.layers:
        for g in layer.gates:
            if g.kind in SINGLE_QUBIT_GATES:
                n_sq += 1
                per_qubit[g.targets[0]] = per_qubit.get(g.targets[0], 0) + 1
            elif g.kind == "FSIM":
                n_tq += 1
                key = g.targets  # already sorted
                per_pair[key] = per_pair.get(key, 0) + 1
    measured = circuit.measured_qubits if (circuit.layers and circuit.layers[-1].kind == MEASURE) else ()
    return GateCensus(
        n_sq=n_sq,
        n_tq=n_tq,
        n_meas=len(measured),
        per_qubit=per_qubit,
        per_pair=per_pair,
        measured=measured,
    )


def relabel(circuit: Circuit, qubit_map: Mapping[int, int]) -> Circuit:
    """Rename qubits through an injective map (structure untouched)."""
    missing = [q for q in circuit.qubits if q not in qubit_map]
    if missing:
        raise CircuitError(f"relabel map missing qubits {missing}")
    images = [qubit_map[q] for q in circuit.qubits]
    if len(set(images)) != len(images):
        raise CircuitError("relabel map is not injective over the circuit qubits")
    new_layers = []
    for layer in circuit.layers:
        gates = tuple(
            Gate(g.kind, tuple(qubit_map[t] for t in g.targets), g.params) for g in layer.gates
        )
        new_layers.append(Layer(layer.kind, gates))
    return Circuit(tuple(images), tuple(new_layers))


def replace_fsim_params(
    circuit: Circuit, pair: tuple[int, int], theta: float, phi: float
) -> Circuit:
    """New circuit with every FSIM on ``pair`` set to (theta, phi)."""
    key = tuple(sorted(int(t) for t in pair))
    hit = False
    layers = []
    for layer in circuit.layers:
        gates = []
        for g in layer.gates:
            if g.kind == "FSIM" and g.targets == key:
                gates.append(Gate("FSIM", key, (float(theta), float(phi))))
                hit = True
            else:
                gates.append(g)
        layers.append(Layer(layer.kind, tuple(gates)))
    if not hit:
        raise CircuitError(f"circuit has no FSIM gate on pair {key}")
    return Circuit(circuit.qubits, tuple(layers))


def _format_angle(x: float) -> str:
    # 17 significant digits: round-trips every double exactly.
    return f"{x:.16e}"


def _gate_line(g: Gate) -> str:
    targets = " ".join(f"Q{t}" for t in g.targets)
    if g.kind == "FSIM":
        return f"FSIM {targets} {_format_angle(g.params[0])} {_format_angle(g.params[1])}"
    return f"{g.kind} {targets}"


def serialize(circuit: Circuit) -> str:
    """Canonical text form; ``parse(serialize(c)) == c``."""
    lines = ["# qubits: " + " ".join(f"Q{q}" for q in circuit.qubits)]
    for i, layer in enumerate(circuit.layers):
        if i:
            lines.append("---")
        lines.extend(_gate_line(g) for g in layer.gates)
    return "\n".join(lines) + "\n"


def _parse_target(token: str, lineno: int) -> int:
    if not token.startswith("Q") or not token[1:].lstrip("-").isdigit():
        raise CircuitSyntaxError(lineno, f"expected qubit label like 'Q3', got {token!r}")
    return int(token[1:])


def _parse_angle(token: str, lineno: int) -> float:
    try:
        return float(token)
    except ValueError:
        raise CircuitSyntaxError(lineno, f"expected an angle in radians, got {token!r}") from None


def parse(text: str) -> Circuit:
    """Parse the line-oriented circuit format (inverse of :func:`serialize`)."""
    qubit_order: tuple[int, ...] | None = None
    sections: list[list[Gate]] = [[]]
    section_lines: list[int] = [1]
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if stripped.startswith("#"):
            body = stripped[1:].strip()
            if body.startswith("qubits:") and qubit_order is None:
                qubit_order = tuple(
                    _parse_target(tok, lineno) for tok in body[len("qubits:"):].split()
                )
            continue
        if "#" in stripped:
            stripped = stripped[: stripped.index("#")].strip()
        if not stripped:
            continue
        if stripped == "---":
            sections.append([])
            section_lines.append(lineno)
            continue
        parts = stripped.split()
        kind = parts[0]
        if kind in SINGLE_QUBIT_GATES:
            if len(parts) != 2:
                raise CircuitSyntaxError(lineno, f"{kind} takes exactly one target")
            gate = Gate(kind, (_parse_target(parts[1], lineno),))
        elif kind == "FSIM":
            if len(parts) != 5:
                raise CircuitSyntaxError(lineno, "FSIM line is 'FSIM Qa Qb <theta> <phi>'")
            gate = Gate(
                "FSIM",
                (_parse_target(parts[1], lineno), _parse_target(parts[2], lineno)),
                (_parse_angle(parts[3], lineno), _parse_angle(parts[4], lineno)),
            )
        elif kind == "MEAS":
            if len(parts) < 2:
                raise CircuitSyntaxError(lineno, "MEAS takes one or more targets")
            gate = Gate("MEAS", tuple(_parse_target(t, lineno) for t in parts[1:]))
        else:
            raise CircuitSyntaxError(lineno, f"unknown gate {kind!r}")
        sections[-1].append(gate)

    layers = []
    for gates, lineno in zip(sections, section_lines):
        if not gates:
            # Only empty DOUBLE layers are canonically representable.
            layers.append(Layer(DOUBLE, ()))
            continue
        kinds = {g.kind for g in gates}
        if kinds <= set(SINGLE_QUBIT_GATES):
            layers.append(Layer(SINGLE, tuple(gates)))
        elif kinds == {"FSIM"}:
            layers.append(Layer(DOUBLE, tuple(gates)))
        elif kinds == {"MEAS"}:
            layers.append(Layer(MEASURE, tuple(gates)))
        else:
            raise CircuitSyntaxError(
                lineno, f"layer mixes incompatible gate kinds {sorted(kinds)}"
            )

    if qubit_order is None:
        seen: dict[int, None] = {}
        for layer in layers:
            for g in layer.gates:
                for t in g.targets:
                    seen.setdefault(t)
        qubit_order = tuple(seen)
    return Circuit(qubit_order, tuple(layers))
