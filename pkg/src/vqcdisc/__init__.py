"""Statevector simulation and training for variational-circuit state discrimination."""

from .circuits import (
    Architecture,
    CircuitLayout,
    apply_circuit,
    build_layout,
    count_entangler_layers,
    universal_two_qubit,
)
from .discrimination import (
    DiscriminationTask,
    cost_dis,
    cost_gen,
    critical_depth,
    helstrom_pure,
    mle_error,
    single_qubit_error,
)
from .ensembles import (
    EnsembleSpec,
    mean_overlap,
    sample_state,
    tfim_ground,
    tfim_hamiltonian,
)
from .estimators import VQCDiscriminator, VQCStatePreparer
from .optimize import (
    OptimizerConfig,
    TrainResult,
    bfgs_minimize,
    finite_diff_gradient,
    gradient_variance,
    multi_restart_train,
)
from .scrambling import avg_operator_size, evolve_operator, operator_size, pauli_decompose
from .statevec import (
    StateVector,
    apply_single_qubit,
    apply_two_qubit,
    bipartite_entropy,
    haar_unitary,
    inner_product,
    outcome_distribution,
    rotation_gate,
)

__version__ = "0.1.0"
