"""Step 2: place logical circuits onto a hardware configuration."""

from dataclasses import dataclass
from pathlib import Path

import rcsbench as rb


@dataclass(frozen=True)
class TranspiledCircuit:
    """A circuit rewritten onto physical labels, plus how it got there."""

    source: rb.Circuit
    circuit: rb.Circuit
    mapping: rb.Mapping
    strategy: str
    budget: int
    use_calibrated_params: bool


def as_model(config) -> rb.HardwareModel:
    """Accept a config path, a parsed config dict, or a loaded model."""
    if isinstance(config, rb.HardwareModel):
        return config
    if isinstance(config, dict):
        return rb.model_from_dict(config)
    return rb.load_config(Path(config))


def transpile(
    circuit: rb.Circuit,
    config,
    *,
    strategy: str = "best",
    budget: int = 200_000,
    use_calibrated_params: bool = False,
) -> TranspiledCircuit:
    """Map one logical circuit onto the device and rewrite its labels.

    ``strategy`` is ``"best"``/``"first"`` for the placement search or
    ``"identity"`` to keep labels as-is (validated against the config).
    """
    model = as_model(config)
    if strategy == "identity":
        mapping = rb.mapping_from_qubit_map(circuit, model, {q: q for q in circuit.qubits})
    else:
        mapping = rb.embed(circuit, model, strategy=strategy, budget=budget)
    phys = rb.apply_mapping(circuit, mapping, model, use_calibrated_params=use_calibrated_params)
    return TranspiledCircuit(
        source=circuit,
        circuit=phys,
        mapping=mapping,
        strategy=strategy,
        budget=int(budget),
        use_calibrated_params=bool(use_calibrated_params),
    )
