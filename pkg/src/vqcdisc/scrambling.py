"""Heisenberg operator evolution and operator-size scrambling metrics.

A Pauli-Z operator seeded at the middle qubit is conjugated gate-by-gate
through a circuit (M -> G† M G in reverse application order, so the full
circuit unitary is never materialized beyond per-gate embeddings), then
expanded over the 4**n Pauli strings. The operator size is the
support-weighted Hilbert-Schmidt mass of that expansion.

Pauli strings are encoded base-4 (digits I=0, X=1, Y=2, Z=3) with qubit 0 as
the most significant digit, matching the statevector bit ordering.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import rng as rngmod
from .circuits import Architecture, CircuitLayout, GateKind, build_layout
from .errors import CapacityError
from .statevec import (
    PAULI_I, PAULI_X, PAULI_Y, PAULI_Z,
    embed_gate, haar_unitary, ry_gate,
)

__all__ = [
    "PauliDecomposition", "evolve_operator", "pauli_decompose",
    "operator_size", "avg_operator_size", "OperatorSizeStats",
    "pauli_string_matrix", "pauli_weights",
]

_PAULIS = (PAULI_I, PAULI_X, PAULI_Y, PAULI_Z)
_PAULI_LABELS = "IXYZ"

_OPERATOR_MAX_QUBITS = 8  # dense 4**n decomposition budget

# W[s, 2b+a] = sigma_s[a, b] / 2: one site of the trace transform
_DECOMPOSE_SITE = np.stack([p.T.reshape(4) / 2.0 for p in _PAULIS])


@dataclass(frozen=True)
class PauliDecomposition:
    """Coefficients of an operator over the n-qubit Pauli-string basis."""

    n_qubits: int
    coefficients: np.ndarray  # length 4**n, base-4 string encoding

    def coefficient(self, label: str) -> complex:
        """Coefficient of a string given as e.g. ``"ZIX"``."""
        if len(label) != self.n_qubits:
            raise ValueError(f"label {label!r} is not {self.n_qubits} characters")
        code = 0
        for ch in label:
            code = 4 * code + _PAULI_LABELS.index(ch)
        return complex(self.coefficients[code])

    def total_weight(self) -> float:
        """Hilbert-Schmidt mass sum |alpha_S|^2."""
        return float(np.sum(np.abs(self.coefficients) ** 2))

    def identity_coefficient(self) -> complex:
        return complex(self.coefficients[0])


def pauli_weights(n: int) -> np.ndarray:
    """L(S) = number of non-identity sites, for every base-4 code."""
    codes = np.arange(4**n)
    weights = np.zeros(4**n, dtype=np.int64)
    for _ in range(n):
        weights += (codes % 4) != 0
        codes //= 4
    return weights


def pauli_string_matrix(n: int, code: int) -> np.ndarray:
    """Dense 2**n x 2**n matrix of one Pauli string."""
    digits = [(code >> (2 * (n - 1 - k))) & 3 for k in range(n)]
    mat = _PAULIS[digits[0]]
    for d in digits[1:]:
        mat = np.kron(mat, _PAULIS[d])
    return mat


def evolve_operator(layout: CircuitLayout, gates: list[np.ndarray] | None = None,
                    params=None, initial: np.ndarray | None = None) -> np.ndarray:
    """Heisenberg-evolve an operator through the circuit: U† M U.

    The initial operator defaults to Pauli Z on qubit floor(n/2). Gates can
    be supplied directly (one unitary per slot, as in random-gate ensembles)
    or generated from ``params`` via the layout's templates.
    """
    n = layout.n_qubits
    if n > _OPERATOR_MAX_QUBITS:
        raise CapacityError(f"dense operator evolution supports n <= "
                            f"{_OPERATOR_MAX_QUBITS}, got {n}")
    if initial is None:
        initial = embed_gate(n, (n // 2,), PAULI_Z)
    if gates is None:
        from .circuits import gate_sequence
        seq = gate_sequence(layout, params)
    else:
        slots = layout.slots
        if len(gates) != len(slots):
            raise ValueError(f"expected {len(slots)} gates, got {len(gates)}")
        seq = [(slot.qubits, g) for slot, g in zip(slots, gates)]
    m = initial.astype(np.complex128, copy=True)
    for qubits, mat in reversed(seq):
        dense = embed_gate(n, qubits, mat)
        m = dense.conj().T @ m @ dense
    return m


def pauli_decompose(m: np.ndarray, n: int) -> PauliDecomposition:
    """Expand a 2**n x 2**n operator over Pauli strings: alpha_S = Tr(S M)/2**n."""
    if m.shape != (2**n, 2**n):
        raise ValueError(f"operator shape {m.shape} does not match n={n}")
    t = m.reshape([2] * (2 * n))
    # interleave to (b_1, a_1, ..., b_n, a_n) then merge each site pair
    order = [ax for k in range(n) for ax in (k, n + k)]
    t = np.ascontiguousarray(t.transpose(order)).reshape([4] * n)
    for k in range(n):
        t = np.moveaxis(np.tensordot(_DECOMPOSE_SITE, t, axes=([1], [k])), 0, k)
    return PauliDecomposition(n, t.reshape(-1))


def operator_size(dec: PauliDecomposition) -> float:
    """Support-weighted mass: sum_S |alpha_S|^2 L(S).

    Requires a Hilbert-Schmidt-normalized decomposition (total weight within
    1e-6 of 1), as produced by evolving a normalized traceless operator.
    """
    total = dec.total_weight()
    if abs(total - 1.0) > 1e-6:
        raise ValueError(f"decomposition is not normalized: sum |alpha|^2 = {total!r}")
    weights = pauli_weights(dec.n_qubits)
    return float(np.sum(np.abs(dec.coefficients) ** 2 * weights))


def _random_slot_gate(kind: GateKind, rng: np.random.Generator) -> np.ndarray:
    if kind is GateKind.U2Q:
        return haar_unitary(4, rng)
    if kind is GateKind.ROT3:
        return haar_unitary(2, rng)
    if kind is GateKind.ROT_Y:
        return ry_gate(rng.uniform(0.0, 2.0 * np.pi))
    from .circuits import CNOT_AB, CZ
    return CZ if kind is GateKind.CZ else CNOT_AB


def random_circuit_gates(layout: CircuitLayout, rng: np.random.Generator) -> list[np.ndarray]:
    """One random gate per slot: Haar for universal and rotation slots."""
    return [_random_slot_gate(slot.kind, rng) for slot in layout.slots]


@dataclass(frozen=True)
class OperatorSizeStats:
    mean: float
    std_err: float
    samples: int


def avg_operator_size(arch: Architecture | str, n: int, depth: int, samples: int,
                      seed: int) -> OperatorSizeStats:
    """Monte-Carlo mean operator size over random-gate circuits."""
    if samples < 1:
        raise ValueError(f"need at least one sample, got {samples}")
    layout = build_layout(arch, n, depth)
    sizes = np.empty(samples)
    for s in range(samples):
        gates = random_circuit_gates(layout, rngmod.generator(seed, s))
        m = evolve_operator(layout, gates=gates)
        sizes[s] = operator_size(pauli_decompose(m, n))
    stderr = float(sizes.std(ddof=1) / np.sqrt(samples)) if samples > 1 else 0.0
    return OperatorSizeStats(float(sizes.mean()), stderr, samples)
