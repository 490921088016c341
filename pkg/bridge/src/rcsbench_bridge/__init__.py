"""Script-shaped bindings over the rcsbench task workflow.

Four steps, four thin wrappers: build circuits from plain data
(`setup_circuit_with_depth`), place them on a device (`transpile`),
sample and post-process as a stored task (`run_task`,
`supremacy_result`), and retrieve artifacts (`download_data`,
`show_opt_parameters`). No numerics live here; every call delegates to
the core library and the standard task-directory layout.
"""

from .circuit import setup_circuit_with_depth
from .job import download_data, run_task, supremacy_result
from .mapping import TranspiledCircuit, transpile
from .show import Figure, show_opt_parameters

__version__ = "0.1.0"

__all__ = [
    "Figure",
    "TranspiledCircuit",
    "download_data",
    "run_task",
    "setup_circuit_with_depth",
    "show_opt_parameters",
    "supremacy_result",
    "transpile",
    "__version__",
]
