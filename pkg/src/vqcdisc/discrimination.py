"""Binary pure-state discrimination: bounds, error probabilities, costs.

All probabilities are computed from exact amplitudes (no measurement
sampling); circuits enter only through the processed outcome distributions
q_i(j) = |<j| U |psi_i>|^2 over the 2**n all-qubit outcomes.

The maximum-likelihood decision declares hypothesis 0 on outcome j whenever
q_0(j) >= q_1(j); with equal priors the error probability is tie-invariant,
so the >= convention is purely for determinism.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .circuits import CircuitLayout, apply_circuit
from .rng import child_seed
from .statevec import StateVector, inner_product, outcome_distribution

__all__ = [
    "DiscriminationTask", "helstrom_pure", "mle_error_from_probs",
    "mle_error", "single_qubit_error", "cost_dis", "cost_gen",
    "critical_depth", "CriticalDepthResult", "marginal_distribution",
]

MODE_MLE = "mle"
MODE_SINGLE_QUBIT = "single-qubit"


@dataclass(frozen=True)
class DiscriminationTask:
    """A pair of equal-prior pure states plus the measurement mode."""

    psi0: StateVector
    psi1: StateVector
    measurement: str = MODE_MLE
    qubit: int | None = None  # measured qubit for single-qubit mode

    def __post_init__(self):
        if self.psi0.n_qubits != self.psi1.n_qubits:
            raise ValueError(f"state dimensions differ: {self.psi0.n_qubits} vs "
                             f"{self.psi1.n_qubits} qubits")
        if self.measurement not in (MODE_MLE, MODE_SINGLE_QUBIT):
            raise ValueError(f"unknown measurement mode {self.measurement!r}")
        if self.measurement == MODE_SINGLE_QUBIT:
            q = self.qubit if self.qubit is not None else self.psi0.n_qubits // 2
            if not 0 <= q < self.psi0.n_qubits:
                raise ValueError(f"measured qubit {q} out of range")
            object.__setattr__(self, "qubit", q)

    @property
    def n_qubits(self) -> int:
        return self.psi0.n_qubits

    def helstrom(self) -> float:
        return helstrom_pure(self.psi0, self.psi1)


def helstrom_pure(psi0: StateVector, psi1: StateVector) -> float:
    """Minimum error probability over all measurements for an equal-prior
    pure-state pair: (1 - sqrt(1 - |<psi0|psi1>|^2)) / 2."""
    overlap = abs(inner_product(psi0, psi1)) ** 2
    value = 0.5 * (1.0 - math.sqrt(max(0.0, 1.0 - overlap)))
    return min(max(value, 0.0), 0.5)


def mle_error_from_probs(q0: np.ndarray, q1: np.ndarray) -> float:
    """MLE error probability for equal priors from two outcome distributions."""
    pick0 = q0 >= q1
    return 0.5 * (1.0 - float(np.sum(q0[pick0] - q1[pick0])))


def _processed_probs(task: DiscriminationTask, layout: CircuitLayout | None,
                     params) -> tuple[np.ndarray, np.ndarray]:
    if layout is None:
        return outcome_distribution(task.psi0), outcome_distribution(task.psi1)
    out0 = apply_circuit(layout, params, task.psi0)
    out1 = apply_circuit(layout, params, task.psi1)
    return outcome_distribution(out0), outcome_distribution(out1)


def mle_error(task: DiscriminationTask, layout: CircuitLayout | None = None,
              params=None) -> float:
    """Error probability of the all-qubit MLE receiver after the circuit.

    ``layout=None`` evaluates the bare (identity-circuit) receiver.
    """
    if task.measurement != MODE_MLE:
        raise ValueError(f"task measurement mode is {task.measurement!r}, "
                         f"expected {MODE_MLE!r}")
    q0, q1 = _processed_probs(task, layout, params)
    return mle_error_from_probs(q0, q1)


def marginal_distribution(probs: np.ndarray, n: int, qubit: int) -> np.ndarray:
    """Marginal (p_bit0, p_bit1) of one qubit from a full outcome distribution."""
    t = probs.reshape([2] * n)
    axes = tuple(a for a in range(n) if a != qubit)
    return t.sum(axis=axes)


def single_qubit_error(task: DiscriminationTask, layout: CircuitLayout | None = None,
                       params=None) -> float:
    """Error probability when only one qubit's Z outcome feeds the decision."""
    if task.measurement != MODE_SINGLE_QUBIT:
        raise ValueError(f"task measurement mode is {task.measurement!r}, "
                         f"expected {MODE_SINGLE_QUBIT!r}")
    q0, q1 = _processed_probs(task, layout, params)
    n = task.n_qubits
    m0 = marginal_distribution(q0, n, task.qubit)
    m1 = marginal_distribution(q1, n, task.qubit)
    return mle_error_from_probs(m0, m1)


def error_probability(task: DiscriminationTask, layout: CircuitLayout | None = None,
                      params=None) -> float:
    """Receiver error probability for the task's measurement mode."""
    if task.measurement == MODE_MLE:
        return mle_error(task, layout, params)
    return single_qubit_error(task, layout, params)


def cost_dis(task: DiscriminationTask, layout: CircuitLayout | None = None,
             params=None) -> float:
    """Training cost: receiver error minus the Helstrom limit (>= 0 within
    rounding)."""
    return error_probability(task, layout, params) - task.helstrom()


def cost_gen(layout: CircuitLayout, params, target: StateVector) -> float:
    """State-preparation cost 1 - |<target| U |0...0>|^2."""
    if target.n_qubits != layout.n_qubits:
        raise ValueError(f"target has {target.n_qubits} qubits, layout needs "
                         f"{layout.n_qubits}")
    prepared = apply_circuit(layout, params, StateVector.zero(layout.n_qubits))
    fidelity = abs(np.vdot(target.amplitudes, prepared.amplitudes)) ** 2
    return 1.0 - fidelity


#: When the ensemble-mean Helstrom limit is numerically zero the relative
#: threshold 2 <P_H> degenerates; this absolute threshold takes over.
DEGENERATE_THRESHOLD = 1e-6


@dataclass(frozen=True)
class CriticalDepthResult:
    critical_depth: int | None
    censored: bool
    threshold: float
    helstrom_mean: float
    curve: tuple[tuple[int, float, float], ...]  # (depth, mean P_E, std err)
    per_depth_params: dict = field(repr=False, default_factory=dict)


def critical_depth(tasks, architecture, *, threshold_multiplier: float = 2.0,
                   depth_limit: int = 10, config=None, seed: int = 0,
                   warm_start: bool = True) -> CriticalDepthResult:
    """Smallest depth whose trained ensemble-mean error meets the threshold.

    Scans depth upward from 0 (identity circuit), training every task at each
    depth with ``multi_restart_train``; when ``warm_start`` is set, one
    restart per task is seeded with the embedded previous-depth solution.
    Returns the whole (depth, mean error) curve; if the threshold is not met
    by ``depth_limit`` the result is censored.
    """
    from .circuits import Architecture, build_layout, embed_params
    from .optimize import OptimizerConfig, make_discrimination_objective, multi_restart_train

    tasks = list(tasks)
    if not tasks:
        raise ValueError("need at least one task")
    if isinstance(architecture, str):
        architecture = Architecture.from_string(architecture)
    config = config or OptimizerConfig()
    n = tasks[0].n_qubits

    ph = float(np.mean([t.helstrom() for t in tasks]))
    threshold = threshold_multiplier * ph if ph >= 1e-12 else DEGENERATE_THRESHOLD

    curve: list[tuple[int, float, float]] = []
    per_depth_params: dict[int, list] = {}
    previous: list | None = None
    previous_layout = None
    for depth in range(depth_limit + 1):
        layout = build_layout(architecture, n, depth)
        errors = np.empty(len(tasks))
        best_params = []
        for t_idx, task in enumerate(tasks):
            if layout.param_count == 0:
                params = np.zeros(0)
            else:
                warm = None
                if warm_start and previous is not None:
                    warm = embed_params(previous_layout, previous[t_idx], layout)
                objective = make_discrimination_objective(task, layout)
                result = multi_restart_train(objective, config,
                                             child_seed(seed, depth, t_idx),
                                             warm_start=warm)
                params = result.best_params
            best_params.append(params)
            errors[t_idx] = error_probability(task, layout, params)
        stderr = float(errors.std(ddof=1) / np.sqrt(len(tasks))) if len(tasks) > 1 else 0.0
        curve.append((depth, float(errors.mean()), stderr))
        per_depth_params[depth] = best_params
        previous, previous_layout = best_params, layout
        if errors.mean() <= threshold:
            return CriticalDepthResult(depth, False, threshold, ph, tuple(curve),
                                       per_depth_params)
    return CriticalDepthResult(None, True, threshold, ph, tuple(curve),
                               per_depth_params)
