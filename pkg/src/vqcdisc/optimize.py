"""Finite-difference gradients, BFGS training, and gradient-variance statistics.

Gradients are central finite differences throughout: the maximum-likelihood
post-processing makes the discrimination cost depend on the parameters through
the decision regions as well, so analytic shift rules do not apply to it. The
parameter-shift rule is implemented only as a cross-check for the generation
cost, whose every parameter multiplies a single Pauli half-angle rotation.

``CircuitCostFunction`` evaluates the same central differences as the naive
loop but caches circuit prefixes and dense suffix operators and batches the
shifted evaluations per gate slot, so one gradient costs O(slots) vectorized
kernel calls instead of O(params * gates) full circuit applications.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import rng as rngmod
from .circuits import (
    CircuitLayout,
    GateKind,
    gate_sequence,
    slot_matrices_batch,
    slot_matrix,
)
from .discrimination import (
    MODE_MLE,
    DiscriminationTask,
)
from .rng import child_seed
from .statevec import (
    StateVector,
    _apply_1q,
    _apply_1q_many,
    _apply_2q,
    _apply_2q_many,
    embed_gate,
)

__all__ = [
    "OptimizerConfig", "TrainResult", "RestartRecord", "BFGSResult",
    "finite_diff_gradient", "parameter_shift_gradient", "bfgs_minimize",
    "multi_restart_train", "gradient_variance", "GradientVarianceResult",
    "CircuitCostFunction", "make_discrimination_objective",
    "make_generation_objective", "write_training_trace",
]

_DENSE_SUFFIX_MAX_DIM = 1024  # above this, fall back to per-gate kernels


@dataclass(frozen=True)
class OptimizerConfig:
    fd_step: float = 1e-6
    max_iterations: int = 500
    gradient_norm_tolerance: float = 1e-8
    cost_tolerance: float = 1e-12
    restarts: int = 40
    wolfe_c1: float = 1e-4
    wolfe_c2: float = 0.9

    def __post_init__(self):
        if not self.fd_step > 0:
            raise ValueError(f"fd_step must be positive, got {self.fd_step}")
        if self.restarts < 1:
            raise ValueError(f"restarts must be >= 1, got {self.restarts}")
        if not 0 < self.wolfe_c1 < self.wolfe_c2 < 1:
            raise ValueError(f"need 0 < c1 < c2 < 1, got c1={self.wolfe_c1}, "
                             f"c2={self.wolfe_c2}")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")


def finite_diff_gradient(cost: Callable[[np.ndarray], float], params,
                         step: float) -> np.ndarray:
    """Central finite difference: g_i = [cost(x+s e_i) - cost(x-s e_i)] / 2s."""
    if not step > 0:
        raise ValueError(f"step must be positive, got {step}")
    params = np.asarray(params, dtype=np.float64)
    grad = np.empty(params.shape[0])
    for i in range(params.shape[0]):
        shifted = params.copy()
        try:
            shifted[i] = params[i] + step
            up = cost(shifted)
            shifted[i] = params[i] - step
            down = cost(shifted)
        except Exception as exc:
            raise RuntimeError(f"cost evaluation failed at coordinate {i}") from exc
        grad[i] = (up - down) / (2.0 * step)
    return grad


def parameter_shift_gradient(cost: Callable[[np.ndarray], float], params) -> np.ndarray:
    """Analytic shift-rule gradient g_i = [cost(x + pi/2 e_i) - cost(x - pi/2 e_i)] / 2.

    Valid only for expectation-value costs (e.g. the generation cost) whose
    parameters each enter through one exp(-i theta P / 2) rotation.
    """
    params = np.asarray(params, dtype=np.float64)
    grad = np.empty(params.shape[0])
    for i in range(params.shape[0]):
        shifted = params.copy()
        shifted[i] = params[i] + math.pi / 2
        up = cost(shifted)
        shifted[i] = params[i] - math.pi / 2
        down = cost(shifted)
        grad[i] = 0.5 * (up - down)
    return grad


def _apply(amps: np.ndarray, n: int, qubits: tuple[int, ...], mat: np.ndarray) -> np.ndarray:
    if len(qubits) == 1:
        return _apply_1q(amps, n, qubits[0], mat)
    return _apply_2q(amps, n, qubits[0], qubits[1], mat)


def _apply_many(amps: np.ndarray, n: int, qubits: tuple[int, ...],
                mats: np.ndarray) -> np.ndarray:
    if len(qubits) == 1:
        return _apply_1q_many(amps, n, qubits[0], mats)
    return _apply_2q_many(amps, n, qubits[0], qubits[1], mats)


class CircuitCostFunction:
    """cost(params) = terminal(final states) for a fixed layout and inputs.

    ``terminal`` maps a list of (batch, 2**n) circuit-output amplitude arrays
    (one per input state) to a (batch,) cost array. ``fd_gradient`` computes
    the exact central finite difference of ``value`` with prefix/suffix
    caching and per-slot batching.
    """

    def __init__(self, layout: CircuitLayout, inputs: Sequence[np.ndarray],
                 terminal: Callable[[list[np.ndarray]], np.ndarray]):
        self.layout = layout
        self.n = layout.n_qubits
        self.inputs = [np.asarray(x, dtype=np.complex128) for x in inputs]
        self.terminal = terminal
        self.slots = layout.slots
        spans: dict[int, tuple[int, int]] = {}
        for pos, slot in enumerate(self.slots):
            for pi in slot.param_indices:
                lo, _ = spans.get(pi, (pos, pos))
                spans[pi] = (lo, pos)
        self._spans = [spans[i] for i in range(layout.param_count)]
        # parameters entirely local to one slot are batched per slot;
        # shared parameters (translation-invariant layouts) replay a segment
        self._local: dict[int, list[int]] = {}
        self._shared: list[int] = []
        for i, (lo, hi) in enumerate(self._spans):
            if lo == hi:
                self._local.setdefault(lo, []).append(i)
            else:
                self._shared.append(i)

    @property
    def param_count(self) -> int:
        return self.layout.param_count

    def final_states(self, params) -> list[np.ndarray]:
        seq = gate_sequence(self.layout, params)
        outs = []
        for amps in self.inputs:
            for qubits, mat in seq:
                amps = _apply(amps, self.n, qubits, mat)
            outs.append(amps)
        return outs

    def value(self, params) -> float:
        finals = [f[np.newaxis, :] for f in self.final_states(params)]
        return float(self.terminal(finals)[0])

    def __call__(self, params) -> float:
        return self.value(params)

    def fd_gradient(self, params, step: float) -> np.ndarray:
        """Central finite difference of ``value`` at ``params``."""
        if not step > 0:
            raise ValueError(f"step must be positive, got {step}")
        params = np.asarray(params, dtype=np.float64)
        seq = gate_sequence(self.layout, params)
        n_gates = len(seq)
        dim = 2**self.n

        prefixes = []
        for amps in self.inputs:
            states = [amps]
            for qubits, mat in seq:
                amps = _apply(amps, self.n, qubits, mat)
                states.append(amps)
            prefixes.append(states)

        dense = dim <= _DENSE_SUFFIX_MAX_DIM
        if dense:
            suffix_t = [None] * (n_gates + 1)  # transposed suffix operators
            suffix_t[n_gates] = np.eye(dim, dtype=np.complex128)
            for k in range(n_gates - 1, -1, -1):
                qubits, mat = seq[k]
                suffix_t[k] = embed_gate(self.n, qubits, mat).T @ suffix_t[k + 1]

        grad = np.empty(self.param_count)

        for k, indices in self._local.items():
            slot = self.slots[k]
            base = params[list(slot.param_indices)]
            batch = np.tile(base, (2 * len(indices), 1))
            within = [slot.param_indices.index(i) for i in indices]
            for j, w in enumerate(within):
                batch[2 * j, w] += step
                batch[2 * j + 1, w] -= step
            mats = slot_matrices_batch(slot.kind, batch)
            finals = []
            for states in prefixes:
                out = _apply_many(states[k], self.n, slot.qubits, mats)
                if dense:
                    out = out @ suffix_t[k + 1]
                else:
                    for g in range(k + 1, n_gates):
                        qb, m = seq[g]
                        out = np.stack([_apply(row, self.n, qb, m) for row in out])
                finals.append(out)
            costs = self.terminal(finals)
            for j, i in enumerate(indices):
                grad[i] = (costs[2 * j] - costs[2 * j + 1]) / (2.0 * step)

        shifted = params.copy()
        for i in self._shared:
            lo, hi = self._spans[i]
            vals = []
            for sign in (1.0, -1.0):
                shifted[i] = params[i] + sign * step
                finals = []
                for states in prefixes:
                    amps = states[lo]
                    for k in range(lo, hi + 1):
                        slot = self.slots[k]
                        if i in slot.param_indices:
                            mat = slot_matrix(slot, shifted)
                        else:
                            mat = seq[k][1]
                        amps = _apply(amps, self.n, slot.qubits, mat)
                    if dense:
                        amps = suffix_t[hi + 1].T @ amps
                    else:
                        for k in range(hi + 1, n_gates):
                            amps = _apply(amps, self.n, *seq[k])
                    finals.append(amps[np.newaxis, :])
                vals.append(float(self.terminal(finals)[0]))
            shifted[i] = params[i]
            grad[i] = (vals[0] - vals[1]) / (2.0 * step)
        return grad


def make_discrimination_objective(task: DiscriminationTask,
                                  layout: CircuitLayout) -> CircuitCostFunction:
    """Objective computing the discrimination cost (receiver error - Helstrom)."""
    if task.n_qubits != layout.n_qubits:
        raise ValueError("task and layout qubit counts differ")
    ph = task.helstrom()
    n = layout.n_qubits
    if task.measurement == MODE_MLE:
        def terminal(finals: list[np.ndarray]) -> np.ndarray:
            q0 = np.abs(finals[0]) ** 2
            q1 = np.abs(finals[1]) ** 2
            diff = q0 - q1
            return 0.5 * (1.0 - np.sum(diff * (diff >= 0), axis=1)) - ph
    else:
        qubit = task.qubit
        axes = tuple(a + 1 for a in range(n) if a != qubit)

        def terminal(finals: list[np.ndarray]) -> np.ndarray:
            batch = finals[0].shape[0]
            m0 = (np.abs(finals[0]) ** 2).reshape([batch] + [2] * n).sum(axis=axes)
            m1 = (np.abs(finals[1]) ** 2).reshape([batch] + [2] * n).sum(axis=axes)
            diff = m0 - m1
            return 0.5 * (1.0 - np.sum(diff * (diff >= 0), axis=1)) - ph
    return CircuitCostFunction(layout, [task.psi0.amplitudes, task.psi1.amplitudes],
                               terminal)


def make_generation_objective(layout: CircuitLayout,
                              target: StateVector) -> CircuitCostFunction:
    """Objective computing the generation cost 1 - |<target| U |0...0>|^2."""
    if target.n_qubits != layout.n_qubits:
        raise ValueError("target and layout qubit counts differ")
    conj_target = target.amplitudes.conj()

    def terminal(finals: list[np.ndarray]) -> np.ndarray:
        return 1.0 - np.abs(finals[0] @ conj_target) ** 2

    zero = StateVector.zero(layout.n_qubits)
    return CircuitCostFunction(layout, [zero.amplitudes], terminal)


@dataclass(frozen=True)
class BFGSResult:
    params: np.ndarray
    cost: float
    history: np.ndarray       # accepted-iterate costs, history[0] = initial
    grad_norms: np.ndarray
    iterations: int
    termination: str


def _wolfe_line_search(phi: Callable[[float], float],
                       dphi: Callable[[float], float],
                       phi0: float, dphi0: float, c1: float, c2: float,
                       max_expand: int = 12, max_zoom: int = 25) -> tuple[float | None, float | None]:
    """Strong-Wolfe step search (bracket then bisection zoom).

    ``phi``/``dphi`` are the cost and its directional derivative along the
    search direction; returns (alpha, phi(alpha)) or (None, None).
    """

    def zoom(lo, hi, phi_lo):
        for _ in range(max_zoom):
            alpha = 0.5 * (lo + hi)
            val = phi(alpha)
            if val > phi0 + c1 * alpha * dphi0 or val >= phi_lo:
                hi = alpha
            else:
                slope = dphi(alpha)
                if abs(slope) <= -c2 * dphi0:
                    return alpha, val
                if slope * (hi - lo) >= 0:
                    hi = lo
                lo, phi_lo = alpha, val
            if abs(hi - lo) < 1e-14:
                break
        if lo > 0 and phi_lo <= phi0 + c1 * lo * dphi0 and phi_lo < phi0:
            return lo, phi_lo
        return None, None

    alpha_prev, phi_prev = 0.0, phi0
    alpha = 1.0
    for it in range(max_expand):
        val = phi(alpha)
        if val > phi0 + c1 * alpha * dphi0 or (it > 0 and val >= phi_prev):
            return zoom(alpha_prev, alpha, phi_prev)
        slope = dphi(alpha)
        if abs(slope) <= -c2 * dphi0:
            return alpha, val
        if slope >= 0:
            return zoom(alpha, alpha_prev, val)
        alpha_prev, phi_prev = alpha, val
        alpha *= 2.0
    return None, None


def bfgs_minimize(cost: Callable[[np.ndarray], float], init, config: OptimizerConfig,
                  gradient: Callable[[np.ndarray], np.ndarray] | None = None) -> BFGSResult:
    """BFGS with inverse-Hessian updates and a strong-Wolfe line search.

    Gradients default to central finite differences with ``config.fd_step``;
    the line search evaluates directional derivatives by central differences
    along the search direction. A failed or non-decreasing line search first
    resets the inverse Hessian to the identity (once per run); a second
    failure terminates the run with the best point so far and the reason
    recorded.
    """
    x = np.asarray(init, dtype=np.float64).copy()
    if gradient is None:
        gradient = lambda p: finite_diff_gradient(cost, p, config.fd_step)

    f = float(cost(x))
    g = gradient(x)
    history = [f]
    grad_norms = [float(np.linalg.norm(g))]
    dim = x.shape[0]
    h_inv = np.eye(dim)
    reset_used = False
    termination = "max_iterations"
    iterations = 0

    def search(xk, pk, fk, gk):
        p_norm = float(np.linalg.norm(pk))
        if p_norm == 0.0:
            return None, None
        h = config.fd_step / p_norm

        def phi(alpha):
            return float(cost(xk + alpha * pk))

        def dphi(alpha):
            return (phi(alpha + h) - phi(alpha - h)) / (2.0 * h)

        dphi0 = float(np.dot(gk, pk))
        if dphi0 >= 0:
            return None, None
        return _wolfe_line_search(phi, dphi, fk, dphi0, config.wolfe_c1,
                                  config.wolfe_c2)

    for iterations in range(1, config.max_iterations + 1):
        if grad_norms[-1] <= config.gradient_norm_tolerance:
            termination = "gradient_norm"
            iterations -= 1
            break
        p = -h_inv @ g
        alpha, f_new = search(x, p, f, g)
        if alpha is None and not reset_used:
            reset_used = True
            h_inv = np.eye(dim)
            p = -g
            alpha, f_new = search(x, p, f, g)
        if alpha is None:
            termination = "line_search_failure"
            iterations -= 1
            break

        x_new = x + alpha * p
        g_new = gradient(x_new)
        s = x_new - x
        y = g_new - g
        sy = float(np.dot(s, y))
        if sy > 1e-14 * np.linalg.norm(s) * np.linalg.norm(y):
            rho = 1.0 / sy
            a = np.eye(dim) - rho * np.outer(s, y)
            h_inv = a @ h_inv @ a.T + rho * np.outer(s, s)

        converged = abs(f - f_new) <= config.cost_tolerance
        x, f, g = x_new, f_new, g_new
        history.append(f)
        grad_norms.append(float(np.linalg.norm(g)))
        if converged:
            termination = "cost_tolerance"
            break

    return BFGSResult(x, f, np.asarray(history), np.asarray(grad_norms),
                      iterations, termination)


@dataclass(frozen=True)
class RestartRecord:
    index: int
    seed: int
    final_cost: float
    iterations: int
    termination: str
    history: np.ndarray = field(repr=False, default_factory=lambda: np.empty(0))
    grad_norms: np.ndarray = field(repr=False, default_factory=lambda: np.empty(0))


@dataclass(frozen=True)
class TrainResult:
    best_params: np.ndarray
    best_cost: float
    best_restart: int
    per_restart: tuple[RestartRecord, ...]
    cost_history: np.ndarray  # winning restart's accepted-iterate costs


def multi_restart_train(objective: CircuitCostFunction, config: OptimizerConfig,
                        seed: int, warm_start=None) -> TrainResult:
    """Best of ``config.restarts`` independent BFGS runs.

    Initializations are i.i.d. uniform on [0, 2 pi) per angle from child
    streams of ``seed``; when ``warm_start`` parameters are given they replace
    restart 0's initialization (used to embed a shallower trained circuit).
    Individual restart failures are recorded, not fatal.
    """
    n_params = objective.param_count
    records: list[RestartRecord] = []
    best: BFGSResult | None = None
    best_index = -1
    for r in range(config.restarts):
        gen = rngmod.generator(seed, r)
        init = gen.uniform(0.0, 2.0 * math.pi, n_params)
        if r == 0 and warm_start is not None:
            init = np.asarray(warm_start, dtype=np.float64)
            if init.shape[0] != n_params:
                raise ValueError("warm start length does not match the objective")
        try:
            result = bfgs_minimize(objective.value, init, config,
                                   gradient=lambda p: objective.fd_gradient(p, config.fd_step))
        except Exception as exc:  # keep the sweep alive, record the failure
            records.append(RestartRecord(r, child_seed(seed, r), math.inf, 0,
                                         f"error: {exc}"))
            continue
        records.append(RestartRecord(r, child_seed(seed, r), result.cost,
                                     result.iterations, result.termination,
                                     result.history, result.grad_norms))
        if best is None or result.cost < best.cost:
            best, best_index = result, r
    if best is None:
        raise RuntimeError(f"all {config.restarts} restarts failed")
    return TrainResult(best.params, best.cost, best_index, tuple(records),
                       best.history)


def write_training_trace(result: TrainResult, path) -> None:
    """CSV trace with columns (restart, iteration, cost, grad_norm)."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("restart,iteration,cost,grad_norm\r\n")
        for rec in result.per_restart:
            for it, (c, gn) in enumerate(zip(rec.history, rec.grad_norms)):
                fh.write(f"{rec.index},{it},{c!r},{gn!r}\r\n")


@dataclass(frozen=True)
class GradientVarianceResult:
    mean_variance: float
    std_err: float
    per_coordinate: np.ndarray
    samples: int


def gradient_variance(objectives: Sequence[CircuitCostFunction],
                      n_param_samples: int, seed: int, fd_step: float = 1e-6,
                      bootstrap: int = 200) -> GradientVarianceResult:
    """Coordinate-averaged gradient variance over (task x parameter) samples.

    For each objective (task) and each of ``n_param_samples`` uniform
    parameter points, computes the finite-difference gradient; Var(g_i) is
    taken over the combined sample for each coordinate, then averaged over
    coordinates. The standard error comes from a bootstrap over the sample.
    """
    objectives = list(objectives)
    total = len(objectives) * n_param_samples
    if total < 2:
        raise ValueError("need at least two gradient samples")
    n_params = objectives[0].param_count
    rows = np.empty((total, n_params))
    k = 0
    for t, obj in enumerate(objectives):
        if obj.param_count != n_params:
            raise ValueError("objectives disagree on parameter count")
        for s in range(n_param_samples):
            theta = rngmod.generator(seed, t, s).uniform(0.0, 2.0 * math.pi, n_params)
            rows[k] = obj.fd_gradient(theta, fd_step)
            k += 1
    per_coordinate = rows.var(axis=0, ddof=1)
    mean_variance = float(per_coordinate.mean())
    boot_gen = rngmod.generator(seed, len(objectives), n_param_samples, 1)
    replicates = np.empty(bootstrap)
    for b in range(bootstrap):
        idx = boot_gen.integers(0, total, total)
        replicates[b] = rows[idx].var(axis=0, ddof=1).mean()
    return GradientVarianceResult(mean_variance, float(replicates.std(ddof=1)),
                                  per_coordinate, total)
