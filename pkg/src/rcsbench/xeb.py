"""Linear cross-entropy benchmarking and fSim parameter refitting.

The estimator is f_xeb = D * mean(p_ideal(x_i)) - 1 with D = 2**n over the
measured qubits; its standard error is sqrt(D^2 * var(p_ideal(x_i)) / N).
For degenerate inputs (one sample, or a deterministic circuit where the
sample variance vanishes) the stderr falls back to 1/sqrt(N), the
Porter-Thomas-limit scale, keeping it positive as promised.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
import scipy.optimize

from . import statevec
from .circuit import Circuit, gate_census, replace_fsim_params
from .sampleset import SampleSet


class QubitOrderError(ValueError):
    """Sample bit order does not match the circuit's measurement order."""


class DegenerateSamplesError(ValueError):
    """Too few samples to support a fit."""


@dataclass(frozen=True)
class XebEstimate:
    f_xeb: float
    n_samples: int
    stderr: float
    n_qubits: int


@dataclass(frozen=True)
class XebCurvePoint:
    cycles: int
    f_xeb: float
    stderr: float
    estimates: tuple[XebEstimate, ...]


@dataclass(frozen=True)
class FsimFitResult:
    theta: float
    phi: float
    objective: float
    trace: tuple[tuple[float, float, float], ...]  # (theta, phi, objective) per evaluation


def _check_order(samples: SampleSet, circuit: Circuit) -> None:
    if samples.qubit_order != circuit.measured_qubits:
        raise QubitOrderError(
            f"samples ordered over {samples.qubit_order} but circuit measures "
            f"{circuit.measured_qubits}"
        )


def _estimate(values: np.ndarray, d: int) -> XebEstimate:
    n = values.size
    f = float(d * values.mean() - 1.0)
    var = float(values.var(ddof=1)) if n >= 2 else 0.0
    stderr = d * math.sqrt(var / n) if var > 0.0 else 1.0 / math.sqrt(n)
    return XebEstimate(f_xeb=f, n_samples=n, stderr=stderr, n_qubits=int(d).bit_length() - 1)


def linear_xeb(
    samples: SampleSet,
    circuit: Circuit,
    *,
    probabilities: np.ndarray | None = None,
    max_qubits: int = statevec.MAX_QUBITS_DEFAULT,
) -> XebEstimate:
    """Estimate fidelity from samples against the circuit's ideal output."""
    _check_order(samples, circuit)
    if probabilities is None:
        probabilities, _ = statevec.ideal_probabilities(circuit, max_qubits=max_qubits)
    d = len(probabilities)
    vals = probabilities[samples.data]
    return _estimate(vals, d)


def xeb_curve(
    instances: Mapping[int, Sequence[tuple[Circuit, SampleSet]]],
    *,
    max_qubits: int = statevec.MAX_QUBITS_DEFAULT,
) -> list[XebCurvePoint]:
    """Per-depth mean estimate with pooled standard error, ascending cycles."""
    points = []
    for cycles in sorted(instances):
        ests = tuple(
            linear_xeb(s, c, max_qubits=max_qubits) for c, s in instances[cycles]
        )
        if not ests:
            raise ValueError(f"no instances at depth {cycles}")
        k = len(ests)
        mean = sum(e.f_xeb for e in ests) / k
        pooled = math.sqrt(sum(e.stderr**2 for e in ests)) / k
        points.append(XebCurvePoint(cycles=cycles, f_xeb=mean, stderr=pooled, estimates=ests))
    return points


def fit_fsim(
    samples: SampleSet,
    circuit: Circuit,
    pair: tuple[int, int],
    init: tuple[float, float],
    *,
    budget: int = 500,
    tol: float = 1e-3,
    step: float = 0.1,
    max_qubits: int = statevec.MAX_QUBITS_DEFAULT,
) -> FsimFitResult:
    """Refit one pair's fSim angles by maximizing the linear XEB of the samples.

    Local derivative-free ascent from ``init``: bounded Nelder-Mead with
    an explicit initial simplex of edge ``step`` (radians), shrinking to
    ``tol``. The search stays in the basin around ``init``; it does not
    scan the whole domain, because the global overlap maximum of a small
    circuit generally is not the generating parameter point. Every
    evaluation lands in the trace and the best evaluated point is
    returned, so the objective never falls below its value at ``init``.
    """
    _check_order(samples, circuit)
    if samples.n_samples < 100:
        raise DegenerateSamplesError(
            f"{samples.n_samples} samples is too few to refit fSim angles; "
            "collect at least 100 (ideally >= 1e4) shots"
        )
    key = tuple(sorted(int(t) for t in pair))
    if key not in gate_census(circuit).per_pair:
        raise ValueError(f"circuit has no FSIM gate on pair {key}")
    if budget < 3:
        raise ValueError("budget must allow at least 3 evaluations")
    if not 0.0 < step <= 1.0:
        raise ValueError("step must lie in (0, 1] radians")

    counts = samples.counts().astype(float)
    n = float(samples.n_samples)
    d = 1 << samples.n_qubits

    trace: list[tuple[float, float, float]] = []

    def objective(theta: float, phi: float) -> float:
        c2 = replace_fsim_params(circuit, key, theta, phi)
        p, _ = statevec.ideal_probabilities(c2, max_qubits=max_qubits)
        f = float(d * (counts @ p) / n - 1.0)
        trace.append((float(theta), float(phi), f))
        return f

    lo = np.array([0.0, -math.pi])
    hi = np.array([math.pi, math.pi])
    x0 = np.clip(np.array([float(init[0]), float(init[1])]), lo, hi)
    objective(*x0)

    # Two passes: a coarse simplex to climb out of sampling noise, then a
    # fine one from the incumbent. Simplex vertices are built explicitly
    # since the default construction degenerates at zero coordinates.
    scale = step
    for _ in range(2):
        remaining = budget - len(trace)
        if remaining < 3:
            break
        x0 = np.array(max(trace, key=lambda t: t[2])[:2])
        simplex = np.array(
            [
                x0,
                np.clip(x0 + np.array([scale, 0.0]), lo, hi),
                np.clip(x0 + np.array([0.0, scale]), lo, hi),
            ]
        )
        scipy.optimize.minimize(
            lambda x: -objective(x[0], x[1]),
            x0=x0,
            method="Nelder-Mead",
            bounds=scipy.optimize.Bounds(lo, hi),
            options={
                "maxfev": remaining,
                "xatol": tol,
                "fatol": 1e-12,
                "initial_simplex": simplex,
            },
        )
        scale = max(scale / 5.0, 2.0 * tol)
    best = max(trace, key=lambda t: t[2])
    return FsimFitResult(theta=best[0], phi=best[1], objective=best[2], trace=tuple(trace))
