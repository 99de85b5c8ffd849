"""Shared test oracles, kept independent of the library's own kernels.

The dense-gate oracle builds full matrices entry by entry with explicit bit
arithmetic (qubit 0 = most significant bit) and never touches the package's
reshape/kron code paths, so kernel bugs cannot hide in both routes.
"""

import numpy as np
import pytest


def dense_gate_oracle(n, qubits, gate):
    """Full 2**n x 2**n embedding of a k-qubit gate, by basis-state walking."""
    dim = 2**n
    k = len(qubits)
    full = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        bits = [(col >> (n - 1 - q)) & 1 for q in range(n)]
        sub_col = 0
        for q in qubits:
            sub_col = 2 * sub_col + bits[q]
        for sub_row in range(2**k):
            amp = gate[sub_row, sub_col]
            if amp == 0:
                continue
            new_bits = list(bits)
            for j, q in enumerate(qubits):
                new_bits[q] = (sub_row >> (k - 1 - j)) & 1
            row = 0
            for b in new_bits:
                row = 2 * row + b
            full[row, col] += amp
    return full


def dense_circuit_oracle(n, gates):
    """Full unitary of a gate list [(qubits, matrix), ...] in application order."""
    u = np.eye(2**n, dtype=complex)
    for qubits, mat in gates:
        u = dense_gate_oracle(n, qubits, mat) @ u
    return u


def random_state_oracle(n, rng):
    """Normalized Gaussian amplitudes: a Haar-random pure state."""
    amps = rng.standard_normal(2**n) + 1j * rng.standard_normal(2**n)
    return amps / np.linalg.norm(amps)


def complete_to_unitary(columns):
    """Unitary whose first columns are the given orthonormal vectors."""
    dim = columns[0].shape[0]
    basis = []
    for v in list(columns) + [np.eye(dim)[:, i] for i in range(dim)]:
        w = np.array(v, dtype=complex)
        for b in basis:
            w = w - np.vdot(b, w) * b
        norm = np.linalg.norm(w)
        if norm > 1e-9:
            basis.append(w / norm)
        if len(basis) == dim:
            break
    return np.column_stack(basis)


def helstrom_measurement_unitary(psi0, psi1):
    """Unitary rotating the Helstrom-optimal measurement basis onto |00..0>,
    |00..1>, built directly from the two-state geometry.

    The optimal projectors for equal priors are the eigenvectors of
    rho0 - rho1 restricted to span{psi0, psi1}.
    """
    e0 = psi0 / np.linalg.norm(psi0)
    r = psi1 - np.vdot(e0, psi1) * e0
    if np.linalg.norm(r) < 1e-12:
        raise ValueError("states are parallel; any basis is optimal")
    e1 = r / np.linalg.norm(r)
    m = np.zeros((2, 2), dtype=complex)
    for i, a in enumerate((e0, e1)):
        for j, b in enumerate((e0, e1)):
            m[i, j] = (np.vdot(a, psi0) * np.vdot(psi0, b)
                       - np.vdot(a, psi1) * np.vdot(psi1, b))
    evals, evecs = np.linalg.eigh(m)
    w_plus = evecs[0, 1] * e0 + evecs[1, 1] * e1   # positive eigenvalue -> decide 0
    w_minus = evecs[0, 0] * e0 + evecs[1, 0] * e1
    basis = complete_to_unitary([w_plus, w_minus])
    return basis.conj().T  # maps w_plus -> |0...0>, w_minus -> |0...1>


def page_entropy_monte_carlo(n, cut, samples, rng):
    """Sampled mean bipartite entropy of Haar states, in bits (independent of
    the library's Haar sampler and entropy code)."""
    d_a, d_b = 2**cut, 2 ** (n - cut)
    total = 0.0
    for _ in range(samples):
        amps = random_state_oracle(n, rng)
        sv = np.linalg.svd(amps.reshape(d_a, d_b), compute_uv=False)
        p = sv**2
        p = p[p > 1e-15]
        total += float(-np.sum(p * np.log2(p)))
    return total / samples


@pytest.fixture
def rng():
    return np.random.default_rng(20240915)
