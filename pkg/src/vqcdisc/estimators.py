"""Scikit-learn style estimators wrapping the circuit-training pipeline.

``VQCDiscriminator`` is a binary classifier over quantum states: ``fit`` takes
the two hypothesis states (rows of a (2, 2**n) complex array) and trains the
circuit; ``predict`` classifies further states by the hypothesis the trained
maximum-likelihood receiver would most probably declare for them.

``VQCStatePreparer`` trains the same circuit families to map |0...0> onto a
target state.

Both subclass ``sklearn.base.BaseEstimator``, so ``get_params`` /
``set_params`` / ``clone`` compose with the usual tooling.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .circuits import apply_circuit, build_layout
from .discrimination import (
    MODE_MLE,
    MODE_SINGLE_QUBIT,
    DiscriminationTask,
    error_probability,
    marginal_distribution,
)
from .optimize import (
    OptimizerConfig,
    make_discrimination_objective,
    make_generation_objective,
    multi_restart_train,
)
from .statevec import StateVector, outcome_distribution
from .validation import check_state_array, check_state_pair

__all__ = ["VQCDiscriminator", "VQCStatePreparer"]


class VQCDiscriminator(BaseEstimator):
    """Trainable binary discriminator of pure quantum states.

    Parameters mirror the training pipeline: circuit architecture and depth,
    measurement mode ('mle' for the all-qubit maximum-likelihood receiver or
    'single-qubit' for a Z measurement at the center qubit), and the
    multi-restart BFGS configuration.
    """

    def __init__(self, architecture: str = "brickwall-open", depth: int = 1,
                 measurement: str = MODE_MLE, restarts: int = 40,
                 fd_step: float = 1e-6, max_iterations: int = 500,
                 gradient_norm_tolerance: float = 1e-8,
                 cost_tolerance: float = 1e-12, random_state: int = 0):
        self.architecture = architecture
        self.depth = depth
        self.measurement = measurement
        self.restarts = restarts
        self.fd_step = fd_step
        self.max_iterations = max_iterations
        self.gradient_norm_tolerance = gradient_norm_tolerance
        self.cost_tolerance = cost_tolerance
        self.random_state = random_state

    def _config(self) -> OptimizerConfig:
        return OptimizerConfig(fd_step=self.fd_step,
                               max_iterations=self.max_iterations,
                               gradient_norm_tolerance=self.gradient_norm_tolerance,
                               cost_tolerance=self.cost_tolerance,
                               restarts=self.restarts)

    def fit(self, X, y=None):
        """Train the circuit to separate the two states in ``X``.

        ``X``: (2, 2**n) complex array, row i the state of hypothesis i.
        ``y``: optional labels for the two rows; defaults to (0, 1).
        """
        psi0, psi1 = check_state_pair(X)
        if y is not None:
            labels = np.asarray(y)
            if labels.shape != (2,) or set(labels.tolist()) != {0, 1}:
                raise ValueError("y must contain exactly the labels 0 and 1")
            if labels[0] == 1:
                psi0, psi1 = psi1, psi0
        self.classes_ = np.array([0, 1])
        n = psi0.shape[0].bit_length() - 1
        task = DiscriminationTask(StateVector(n, psi0), StateVector(n, psi1),
                                  measurement=self.measurement)
        layout = build_layout(self.architecture, n, self.depth)
        if layout.param_count == 0:
            params = np.zeros(0)
            self.train_result_ = None
        else:
            objective = make_discrimination_objective(task, layout)
            self.train_result_ = multi_restart_train(objective, self._config(),
                                                     self.random_state)
            params = self.train_result_.best_params
        self.n_qubits_ = n
        self.task_ = task
        self.layout_ = layout
        self.params_ = params
        self.helstrom_limit_ = task.helstrom()
        self.error_probability_ = error_probability(task, layout, params)
        self.cost_ = self.error_probability_ - self.helstrom_limit_
        q0 = outcome_distribution(apply_circuit(layout, params, task.psi0))
        q1 = outcome_distribution(apply_circuit(layout, params, task.psi1))
        if self.measurement == MODE_SINGLE_QUBIT:
            q0 = marginal_distribution(q0, n, task.qubit)
            q1 = marginal_distribution(q1, n, task.qubit)
        self.decision_rule_ = np.where(q0 >= q1, 0, 1)
        return self

    def _declare_probabilities(self, X) -> np.ndarray:
        check_is_fitted(self, "params_")
        X = np.asarray(X, dtype=np.complex128)
        if X.ndim == 1:
            X = X[np.newaxis, :]
        out = np.empty((X.shape[0], 2))
        for i, row in enumerate(X):
            state = StateVector(self.n_qubits_,
                                check_state_array(row, self.n_qubits_))
            probs = outcome_distribution(apply_circuit(self.layout_, self.params_, state))
            if self.measurement == MODE_SINGLE_QUBIT:
                probs = marginal_distribution(probs, self.n_qubits_, self.task_.qubit)
            p0 = float(probs[self.decision_rule_ == 0].sum())
            out[i] = (p0, 1.0 - p0)
        return out

    def predict_proba(self, X) -> np.ndarray:
        """Probability that the trained receiver declares each hypothesis."""
        return self._declare_probabilities(X)

    def predict(self, X) -> np.ndarray:
        """Most probable declared hypothesis for each input state."""
        return np.argmax(self._declare_probabilities(X), axis=1)

    def score(self, X, y) -> float:
        y = np.asarray(y).ravel()
        return float(np.mean(self.predict(X) == y))


class VQCStatePreparer(BaseEstimator):
    """Trains a circuit to prepare a target state from |0...0>."""

    def __init__(self, architecture: str = "brickwall-open", depth: int = 1,
                 restarts: int = 40, fd_step: float = 1e-6,
                 max_iterations: int = 500,
                 gradient_norm_tolerance: float = 1e-8,
                 cost_tolerance: float = 1e-12, random_state: int = 0):
        self.architecture = architecture
        self.depth = depth
        self.restarts = restarts
        self.fd_step = fd_step
        self.max_iterations = max_iterations
        self.gradient_norm_tolerance = gradient_norm_tolerance
        self.cost_tolerance = cost_tolerance
        self.random_state = random_state

    def fit(self, X, y=None):
        """Train toward the target state ``X`` (a single amplitude vector)."""
        target = check_state_array(np.asarray(X).ravel(), name="target")
        n = target.shape[0].bit_length() - 1
        layout = build_layout(self.architecture, n, self.depth)
        config = OptimizerConfig(fd_step=self.fd_step,
                                 max_iterations=self.max_iterations,
                                 gradient_norm_tolerance=self.gradient_norm_tolerance,
                                 cost_tolerance=self.cost_tolerance,
                                 restarts=self.restarts)
        objective = make_generation_objective(layout, StateVector(n, target))
        self.train_result_ = multi_restart_train(objective, config, self.random_state)
        self.n_qubits_ = n
        self.layout_ = layout
        self.params_ = self.train_result_.best_params
        self.cost_ = self.train_result_.best_cost
        self.fidelity_ = 1.0 - self.cost_
        return self

    def prepare(self) -> np.ndarray:
        """Amplitudes of the state the trained circuit prepares from |0...0>."""
        check_is_fitted(self, "params_")
        out = apply_circuit(self.layout_, self.params_,
                            StateVector.zero(self.n_qubits_))
        return out.amplitudes
