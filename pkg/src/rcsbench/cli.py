"""Command-line pipeline: gen, transpile, run, xeb, fit, cost, report, export.

Global flags (--task-root, --config, --seed, --json) are accepted by every
subcommand. Human-readable summaries go to stdout by default; --json
switches to machine-readable output. Errors print to stderr, exit code 1.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from .circuit import CircuitError
from .embedding import EmbeddingError
from .hwmodel import ConfigError, ConfigValidationError, EmptySelectionError
from .noise import MappingError
from .workflow import TaskStore, WorkflowError
from . import workflow

_USER_ERRORS = (
    WorkflowError,
    EmbeddingError,
    ConfigError,
    ConfigValidationError,
    EmptySelectionError,
    CircuitError,
    MappingError,
    ValueError,
    OSError,
)


def _depth_list(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad depth list {text!r}; expected e.g. 8,12,16")


def _pair(text: str) -> tuple[int, int]:
    toks = [tok for tok in text.split(",") if tok.strip()]
    if len(toks) != 2:
        raise argparse.ArgumentTypeError(f"bad pair {text!r}; expected e.g. 3,7")
    try:
        return int(toks[0]), int(toks[1])
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad pair {text!r}; expected two integers")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--task-root", default="tasks", help="task store directory")
    common.add_argument("--config", default=None, help="hardware config JSON path")
    common.add_argument("--seed", type=int, default=0, help="master seed (u64)")
    common.add_argument("--json", action="store_true", help="machine-readable stdout")

    parser = argparse.ArgumentParser(
        prog="rcsbench",
        description="Random-circuit-sampling benchmark pipeline over a file task store.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", parents=[common], help="generate patterned random circuits")
    p.add_argument("--rows", type=int, required=True)
    p.add_argument("--cols", type=int, required=True)
    p.add_argument("--depths", type=_depth_list, required=True, help="cycle counts, e.g. 8,12")
    p.add_argument("--instances", type=int, default=1, help="circuits per depth")
    p.add_argument("--sequence", default="".join(workflow.DEFAULT_SEQUENCE))
    p.add_argument("--allow-repeat", action="store_true",
                   help="let a qubit repeat its previous one-qubit gate")
    p.add_argument("--theta", type=float, default=math.pi / 2, help="fSim swap angle")
    p.add_argument("--phi", type=float, default=math.pi / 6, help="fSim phase angle")
    p.add_argument("--task-id", default=None, help="override the generated task id")
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("transpile", parents=[common], help="map circuits onto the hardware")
    p.add_argument("task_id")
    p.add_argument("--strategy", choices=("best", "first", "identity"), default="best")
    p.add_argument("--budget", type=int, default=200_000, help="placement search expansions")
    p.add_argument("--calibrated-params", action="store_true",
                   help="substitute each coupler's calibrated fSim angles")
    p.set_defaults(func=_cmd_transpile)

    p = sub.add_parser("run", parents=[common], help="sample all circuits on a backend")
    p.add_argument("task_id")
    p.add_argument("--backend", choices=workflow.BACKENDS, default=None)
    p.add_argument("--shots", type=int, default=None)
    p.add_argument("--fidelity", type=float, default=None, help="white-noise fidelity")
    p.add_argument("--resume", action="store_true",
                   help="continue a running task with its recorded settings")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("xeb", parents=[common], help="compute XEB estimates and forecasts")
    p.add_argument("task_id")
    p.set_defaults(func=_cmd_xeb)

    p = sub.add_parser("fit", parents=[common], help="refit one coupler's fSim angles")
    p.add_argument("task_id")
    p.add_argument("--circuit", type=int, required=True)
    p.add_argument("--pair", type=_pair, required=True, help="physical pair, e.g. 3,7")
    p.add_argument("--theta0", type=float, default=None)
    p.add_argument("--phi0", type=float, default=None)
    p.add_argument("--budget", type=int, default=500)
    p.add_argument("--tol", type=float, default=1e-3)
    p.add_argument("--store", action="store_true", help="record the fit in results.json")
    p.set_defaults(func=_cmd_fit)

    p = sub.add_parser("cost", parents=[common], help="classical contraction cost estimate")
    p.add_argument("task_id")
    p.add_argument("--circuit", type=int, required=True)
    p.add_argument("--scenario", choices=sorted(workflow.tncost.SCENARIOS),
                   default="frontier-9.2PB")
    p.add_argument("--samples", type=int, default=1)
    p.add_argument("--fidelity", type=float, default=1.0)
    p.add_argument("--restarts", type=int, default=8)
    p.add_argument("--bitstring", default=None)
    p.add_argument("--bytes-per-element", type=float, default=8.0)
    p.set_defaults(func=_cmd_cost)

    p = sub.add_parser("report", parents=[common], help="emit CSV/SVG report files")
    p.add_argument("task_id")
    p.set_defaults(func=_cmd_report)

    p = sub.add_parser("export", parents=[common], help="zip the task directory")
    p.add_argument("task_id")
    p.add_argument("--output", default=None)
    p.set_defaults(func=_cmd_export)
    return parser


def _store(args) -> TaskStore:
    return TaskStore(args.task_root)


def _cmd_gen(args) -> tuple[dict, list[str]]:
    task_id = workflow.gen_task(
        _store(args),
        rows=args.rows,
        cols=args.cols,
        depths=args.depths,
        instances=args.instances,
        seed=args.seed,
        sequence=tuple(args.sequence),
        allow_repeat=args.allow_repeat,
        fsim_params=(args.theta, args.phi),
        task_id=args.task_id,
    )
    n = len(args.depths) * args.instances
    return {"task_id": task_id, "circuits": n}, [f"task {task_id}: {n} circuits generated"]


def _cmd_transpile(args) -> tuple[dict, list[str]]:
    if args.config is None:
        raise WorkflowError("transpile needs --config")
    doc = workflow.transpile_task(
        _store(args),
        args.task_id,
        args.config,
        strategy="best" if args.strategy == "identity" else args.strategy,
        budget=args.budget,
        identity=args.strategy == "identity",
        use_calibrated_params=args.calibrated_params,
    )
    scores = [c["score"] for c in doc["circuits"]]
    lines = [
        f"task {args.task_id}: {len(doc['circuits'])} circuits placed "
        f"(strategy {doc['strategy']}, best score {min(scores):.6f})"
    ]
    return doc, lines


def _cmd_run(args) -> tuple[dict, list[str]]:
    out = workflow.run_task(
        _store(args),
        args.task_id,
        backend=None if args.resume else args.backend,
        shots=None if args.resume else args.shots,
        seed=None if args.resume else args.seed,
        fidelity=None if args.resume else args.fidelity,
    )
    return out, [f"task {args.task_id}: {out['circuits']} circuits sampled, status done"]


def _cmd_xeb(args) -> tuple[dict, list[str]]:
    results = workflow.xeb_task(_store(args), args.task_id)
    lines = []
    for row in results["per_depth"]:
        lines.append(
            f"cycles={row['cycles']}: f_xeb={row['f_xeb']:.6f} "
            f"+/- {row['stderr']:.6f} ({len(row['circuits'])} circuits)"
        )
    return results, lines


def _cmd_fit(args) -> tuple[dict, list[str]]:
    init = None
    if (args.theta0 is None) != (args.phi0 is None):
        raise WorkflowError("--theta0 and --phi0 must be given together")
    if args.theta0 is not None:
        init = (args.theta0, args.phi0)
    doc = workflow.fit_task(
        _store(args),
        args.task_id,
        args.circuit,
        args.pair,
        init=init,
        budget=args.budget,
        tol=args.tol,
        store_result=args.store,
    )
    lines = [
        f"circuit {doc['index']} pair ({doc['pair'][0]}, {doc['pair'][1]}): "
        f"theta={doc['theta']:.6f} phi={doc['phi']:.6f} "
        f"objective={doc['objective']:.6f} ({doc['evaluations']} evaluations)"
    ]
    return doc, lines


def _cmd_cost(args) -> tuple[dict, list[str]]:
    doc = workflow.cost_task(
        _store(args),
        args.task_id,
        args.circuit,
        scenario=args.scenario,
        n_samples=args.samples,
        fidelity=args.fidelity,
        restarts=args.restarts,
        seed=args.seed,
        bitstring=args.bitstring,
        bytes_per_element=args.bytes_per_element,
    )
    lines = [
        f"circuit {doc['circuit']}: {doc['flops_complex']:.3e} complex flops/amplitude, "
        f"peak {doc['peak_elements']} elements, {len(doc['sliced_bonds'])} sliced bonds",
        f"{doc['n_samples']} samples at fidelity {doc['fidelity']}: "
        f"{doc['total_flops']:.3e} flops, {doc['seconds']:.3e} s "
        f"({doc['years']:.3e} years) on {doc['profile']['name']}",
    ]
    return doc, lines


def _cmd_report(args) -> tuple[dict, list[str]]:
    paths = workflow.report_task(_store(args), args.task_id)
    return paths, [f"wrote {paths['curve_csv']}",
                   f"wrote {paths['curve_svg']}",
                   f"wrote {paths['error_cdf_csv']}"]


def _cmd_export(args) -> tuple[dict, list[str]]:
    out = workflow.export_task(_store(args), args.task_id, output=args.output)
    return {"archive": str(out)}, [f"wrote {out}"]


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        doc, lines = args.func(args)
    except _USER_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.json:
        print(json.dumps(doc, indent=1, sort_keys=True))
    else:
        for line in lines:
            print(line)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
