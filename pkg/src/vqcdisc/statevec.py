"""Dense n-qubit statevector engine.

Conventions, fixed repo-wide:

* Basis index ``j`` encodes the computational basis string with **qubit 0 as
  the most significant bit**, so reshaping amplitudes to ``[2] * n`` puts
  qubit ``q`` on axis ``q``.
* States are complex128 and unit norm; gates are complex128 unitaries.
* Entropies are reported in bits (log base 2), which makes a Bell pair
  across a 1|1 cut exactly 1.
* Global phase is never canonicalized; states are compared through
  ``|inner_product|`` or outcome probabilities.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .validation import check_finite_angles, check_state_array, check_unitary

__all__ = [
    "StateVector",
    "PAULI_I", "PAULI_X", "PAULI_Y", "PAULI_Z",
    "rz_gate", "ry_gate", "rotation_gate",
    "apply_single_qubit", "apply_two_qubit",
    "haar_unitary", "inner_product", "outcome_distribution",
    "bipartite_entropy", "page_average_entropy", "embed_gate",
]

PAULI_I = np.eye(2, dtype=np.complex128)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)


@dataclass(frozen=True)
class StateVector:
    """Pure state of ``n_qubits`` qubits as 2**n complex amplitudes."""

    n_qubits: int
    amplitudes: np.ndarray

    @classmethod
    def zero(cls, n_qubits: int) -> "StateVector":
        """|0...0> on ``n_qubits`` qubits."""
        if n_qubits < 1:
            raise ValueError(f"need at least one qubit, got {n_qubits}")
        amps = np.zeros(2**n_qubits, dtype=np.complex128)
        amps[0] = 1.0
        return cls(n_qubits, amps)

    @classmethod
    def from_amplitudes(cls, amps) -> "StateVector":
        """Wrap and validate an amplitude vector (unit norm within 1e-10)."""
        arr = check_state_array(amps)
        return cls(arr.shape[0].bit_length() - 1, arr)

    def norm_error(self) -> float:
        """|‖ψ‖² − 1| of the stored amplitudes."""
        return abs(float(np.sum(np.abs(self.amplitudes) ** 2)) - 1.0)


def rz_gate(theta: float) -> np.ndarray:
    """exp(-i*theta*Z/2)."""
    (theta,) = check_finite_angles(theta)
    p = np.exp(-0.5j * theta)
    return np.array([[p, 0], [0, np.conj(p)]], dtype=np.complex128)


def ry_gate(theta: float) -> np.ndarray:
    """exp(-i*theta*Y/2)."""
    (theta,) = check_finite_angles(theta)
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=np.complex128)


def rotation_gate(theta1: float, theta2: float, theta3: float) -> np.ndarray:
    """General single-qubit rotation exp(-i*t1*Z/2) exp(-i*t2*Y/2) exp(-i*t3*Z/2)."""
    theta1, theta2, theta3 = check_finite_angles(theta1, theta2, theta3)
    return rz_gate(theta1) @ ry_gate(theta2) @ rz_gate(theta3)


def _apply_1q(amps: np.ndarray, n: int, q: int, g: np.ndarray) -> np.ndarray:
    """Raw kernel: apply a 2x2 matrix to qubit ``q``. No validation."""
    psi = amps.reshape([2] * n)
    out = np.tensordot(g, psi, axes=([1], [q]))
    return np.moveaxis(out, 0, q).reshape(-1)


def _apply_2q(amps: np.ndarray, n: int, qa: int, qb: int, g: np.ndarray) -> np.ndarray:
    """Raw kernel: apply a 4x4 matrix to qubits (qa, qb), qa more significant."""
    psi = amps.reshape([2] * n)
    gt = g.reshape(2, 2, 2, 2)
    out = np.tensordot(gt, psi, axes=([2, 3], [qa, qb]))
    return np.moveaxis(out, (0, 1), (qa, qb)).reshape(-1)


def _apply_1q_many(amps: np.ndarray, n: int, q: int, gates: np.ndarray) -> np.ndarray:
    """One state, a batch of 2x2 gates on qubit q -> (batch, 2**n) states."""
    psi = np.moveaxis(amps.reshape([2] * n), q, 0).reshape(2, -1)
    out = np.matmul(gates, psi)  # (B, 2, rest)
    b = gates.shape[0]
    out = out.reshape([b] + [2] * n)
    return np.moveaxis(out, 1, q + 1).reshape(b, -1)


def _apply_2q_many(amps: np.ndarray, n: int, qa: int, qb: int,
                   gates: np.ndarray) -> np.ndarray:
    """One state, a batch of 4x4 gates on (qa, qb) -> (batch, 2**n) states."""
    psi = np.moveaxis(amps.reshape([2] * n), (qa, qb), (0, 1)).reshape(4, -1)
    out = np.matmul(gates, psi)  # (B, 4, rest)
    b = gates.shape[0]
    out = out.reshape([b] + [2] * n)
    return np.moveaxis(out, (1, 2), (qa + 1, qb + 1)).reshape(b, -1)


def apply_single_qubit(state: StateVector, q: int, g) -> StateVector:
    """Apply a single-qubit unitary to qubit ``q`` of ``state``."""
    if not 0 <= q < state.n_qubits:
        raise ValueError(f"qubit index {q} out of range for {state.n_qubits} qubits")
    g = check_unitary(g, 2)
    amps = _apply_1q(state.amplitudes, state.n_qubits, q, g)
    return StateVector(state.n_qubits, amps)


def apply_two_qubit(state: StateVector, q_a: int, q_b: int, g) -> StateVector:
    """Apply a two-qubit unitary to qubits (q_a, q_b) of ``state``.

    The row/column ordering of ``g`` treats q_a as the more significant
    index: basis order |q_a q_b> = |00>, |01>, |10>, |11>.
    """
    n = state.n_qubits
    if q_a == q_b:
        raise ValueError(f"two-qubit gate needs distinct qubits, got ({q_a}, {q_b})")
    for q in (q_a, q_b):
        if not 0 <= q < n:
            raise ValueError(f"qubit index {q} out of range for {n} qubits")
    g = check_unitary(g, 4)
    amps = _apply_2q(state.amplitudes, n, q_a, q_b, g)
    return StateVector(n, amps)


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Sample from the Haar measure on U(dim).

    QR-decomposes a matrix of i.i.d. standard complex Gaussians and rescales
    the columns of Q by r_kk/|r_kk| to remove the QR phase ambiguity.
    """
    if dim < 1:
        raise ValueError(f"dimension must be >= 1, got {dim}")
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(z / np.sqrt(2.0))
    d = np.diagonal(r)
    return q * (d / np.abs(d))[np.newaxis, :]


def inner_product(a: StateVector, b: StateVector) -> complex:
    """<a|b> = sum_j conj(a_j) * b_j."""
    if a.n_qubits != b.n_qubits:
        raise ValueError(f"dimension mismatch: {a.n_qubits} vs {b.n_qubits} qubits")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def outcome_distribution(state: StateVector) -> np.ndarray:
    """Probability of each all-qubit computational-basis outcome."""
    return np.abs(state.amplitudes) ** 2


def bipartite_entropy(state: StateVector, cut: int) -> float:
    """Von Neumann entanglement entropy across qubits [0, cut) | [cut, n), in bits."""
    n = state.n_qubits
    if not 1 <= cut <= n - 1:
        raise ValueError(f"cut must be in [1, {n - 1}], got {cut}")
    mat = state.amplitudes.reshape(2**cut, 2 ** (n - cut))
    sv = np.linalg.svd(mat, compute_uv=False)
    p = sv**2
    p = p[p > 1e-15]
    return float(-np.sum(p * np.log2(p)))


def page_average_entropy(dim_a: int, dim_b: int) -> float:
    """Ensemble-average entanglement entropy of Haar-random pure states, in bits.

    Closed form sum_{k=max(dim)+1}^{dim_a*dim_b} 1/k - (min(dim)-1)/(2*max(dim))
    nats, converted to bits.
    """
    m, n = min(dim_a, dim_b), max(dim_a, dim_b)
    harmonic_tail = np.sum(1.0 / np.arange(n + 1, m * n + 1))
    return float((harmonic_tail - (m - 1) / (2.0 * n)) / np.log(2.0))


def embed_gate(n: int, qubits: tuple[int, ...], g: np.ndarray) -> np.ndarray:
    """Dense 2**n x 2**n embedding of a k-qubit gate acting on ``qubits``.

    Used by operator-evolution routines; the statevector kernels above never
    materialize this matrix.
    """
    k = len(qubits)
    if g.shape != (2**k, 2**k):
        raise ValueError(f"gate shape {g.shape} does not match {k} qubits")
    if len(set(qubits)) != k or not all(0 <= q < n for q in qubits):
        raise ValueError(f"invalid qubit tuple {qubits} for n={n}")
    rest = [q for q in range(n) if q not in qubits]
    full = np.kron(g, np.eye(2 ** (n - k), dtype=np.complex128))
    order = list(qubits) + rest
    # permute tensor factors from (qubits..., rest...) back to 0..n-1
    perm = np.argsort(order)
    t = full.reshape([2] * (2 * n))
    t = np.transpose(t, list(perm) + [n + p for p in perm])
    return np.ascontiguousarray(t.reshape(2**n, 2**n))
