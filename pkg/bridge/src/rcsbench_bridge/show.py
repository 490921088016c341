"""Step 4: visualize stored fSim optimization traces."""

import tempfile
from dataclasses import dataclass
from pathlib import Path

from rcsbench import svgplot
from rcsbench.workflow import TaskStore, WorkflowError, task_result

from .mapping import as_model


@dataclass(frozen=True)
class Figure:
    """An SVG document with save/show conveniences."""

    svg: str

    def save(self, path: str | Path) -> Path:
        out = Path(path)
        out.write_text(self.svg)
        return out

    def show(self) -> Path:
        """Write to a temp file and print its path (headless-friendly)."""
        with tempfile.NamedTemporaryFile(
            mode="w", suffix=".svg", prefix="rcsbench-", delete=False
        ) as fh:
            fh.write(self.svg)
            out = Path(fh.name)
        print(out)
        return out


def show_opt_parameters(config, task_id: str, *, task_root: str | Path = "tasks") -> Figure:
    """Plot each stored fit's objective trace, one series per fit."""
    model = as_model(config)
    results = task_result(TaskStore(task_root), task_id)
    fits = results.get("fits")
    if not fits:
        raise WorkflowError(f"task {task_id} has no stored fits; run with auto_opt=True")
    series = []
    for key in sorted(fits):
        doc = fits[key]
        objective = [step[2] for step in doc["trace"]]
        series.append(
            svgplot.Series(
                f"circuit {doc['index']}, pair {doc['pair'][0]}-{doc['pair'][1]}",
                list(range(1, len(objective) + 1)),
                objective,
                marker=False,
            )
        )
    svg = svgplot.render(
        series,
        title=f"fSim optimization on {model.name}, task {task_id}",
        xlabel="evaluation",
        ylabel="linear XEB objective",
    )
    return Figure(svg)
