"""Random-circuit-sampling benchmark toolkit.

Patterned random circuit generation, state-vector and tensor-network
simulation, discrete error modeling, cross-entropy benchmarking,
hardware placement, classical-cost estimation, and a file-backed task
pipeline with a CLI front end.
"""

from .circuit import (
    Circuit,
    CircuitError,
    CircuitSyntaxError,
    DEFAULT_FSIM_PARAMS,
    DEFAULT_SEQUENCE,
    Gate,
    GateCensus,
    Layer,
    PatternSchedule,
    ScheduleError,
    gate_census,
    generate_rcs,
    grid_pattern_schedule,
    parse,
    relabel,
    replace_fsim_params,
    serialize,
    split_patches,
)
from .embedding import (
    BudgetExhaustedError,
    EmbeddingError,
    Mapping,
    NoEmbeddingError,
    apply_mapping,
    embed,
    mapping_from_qubit_map,
)
from .hwmodel import (
    ConfigError,
    ConfigValidationError,
    CouplerRecord,
    EmptySelectionError,
    ErrorSummary,
    HardwareModel,
    QubitRecord,
    error_summary,
    exclude_qubits,
    load_config,
    model_from_dict,
    model_to_dict,
    save_config,
)
from .noise import (
    FidelityForecast,
    MappingError,
    TrajectoryStats,
    forecast_fidelity,
    identity_mapping,
    sample_pauli_trajectories,
    sample_white_noise,
)
from .sampleset import SampleSet, load_samples, save_samples
from .statevec import (
    StateVector,
    TooManyQubitsError,
    amplitude,
    ideal_probabilities,
    sample,
    simulate,
)
from .tncost import (
    ContractionPlan,
    CostScenario,
    MachineProfile,
    RuntimeEstimate,
    SCENARIOS,
    TensorNetwork,
    build_network,
    contract_amplitude,
    cost_report,
    estimate_runtime,
    estimate_sampling_cost,
    evaluate_plan,
    memory_cap_elements,
    plan_contraction,
)
from .workflow import (
    LockError,
    StatusError,
    TaskFailedError,
    TaskNotFoundError,
    TaskStore,
    WorkflowError,
    cost_task,
    circuit_seed,
    export_task,
    fit_task,
    gen_task,
    report_task,
    run_circuit_seed,
    run_task,
    task_result,
    transpile_task,
    xeb_task,
)
from .xeb import (
    DegenerateSamplesError,
    FsimFitResult,
    QubitOrderError,
    XebCurvePoint,
    XebEstimate,
    fit_fsim,
    linear_xeb,
    xeb_curve,
)

__version__ = "0.1.0"

__all__ = [
    "Circuit",
    "CircuitError",
    "CircuitSyntaxError",
    "DEFAULT_FSIM_PARAMS",
    "DEFAULT_SEQUENCE",
    "Gate",
    "GateCensus",
    "Layer",
    "PatternSchedule",
    "ScheduleError",
    "gate_census",
    "generate_rcs",
    "grid_pattern_schedule",
    "parse",
    "relabel",
    "replace_fsim_params",
    "serialize",
    "split_patches",
    "BudgetExhaustedError",
    "EmbeddingError",
    "Mapping",
    "NoEmbeddingError",
    "apply_mapping",
    "embed",
    "mapping_from_qubit_map",
    "ConfigError",
    "ConfigValidationError",
    "CouplerRecord",
    "EmptySelectionError",
    "ErrorSummary",
    "HardwareModel",
    "QubitRecord",
    "error_summary",
    "exclude_qubits",
    "load_config",
    "model_from_dict",
    "model_to_dict",
    "save_config",
    "FidelityForecast",
    "MappingError",
    "TrajectoryStats",
    "forecast_fidelity",
    "identity_mapping",
    "sample_pauli_trajectories",
    "sample_white_noise",
    "SampleSet",
    "load_samples",
    "save_samples",
    "StateVector",
    "TooManyQubitsError",
    "amplitude",
    "ideal_probabilities",
    "sample",
    "simulate",
    "ContractionPlan",
    "CostScenario",
    "MachineProfile",
    "RuntimeEstimate",
    "SCENARIOS",
    "TensorNetwork",
    "build_network",
    "contract_amplitude",
    "cost_report",
    "estimate_runtime",
    "estimate_sampling_cost",
    "evaluate_plan",
    "memory_cap_elements",
    "plan_contraction",
    "LockError",
    "StatusError",
    "TaskFailedError",
    "TaskNotFoundError",
    "TaskStore",
    "WorkflowError",
    "cost_task",
    "circuit_seed",
    "export_task",
    "fit_task",
    "gen_task",
    "report_task",
    "run_circuit_seed",
    "run_task",
    "task_result",
    "transpile_task",
    "xeb_task",
    "DegenerateSamplesError",
    "FsimFitResult",
    "QubitOrderError",
    "XebCurvePoint",
    "XebEstimate",
    "fit_fsim",
    "linear_xeb",
    "xeb_curve",
    "__version__",
]
