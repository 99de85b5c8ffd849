"""Input validation helpers shared by the library and the estimator API."""

from __future__ import annotations

import numpy as np

__all__ = [
    "check_state_array",
    "check_state_pair",
    "check_unitary",
    "check_finite_angles",
]


def check_state_array(x, n_qubits: int | None = None, *, name: str = "state",
                      atol: float = 1e-10) -> np.ndarray:
    """Validate a single pure-state amplitude vector.

    Accepts any array-like of 2**n complex amplitudes with unit norm (within
    ``atol``) and returns a contiguous complex128 copy.
    """
    arr = np.asarray(x, dtype=np.complex128).ravel()
    dim = arr.shape[0]
    n = int(dim).bit_length() - 1
    if dim < 2 or dim != 2**n:
        raise ValueError(f"{name}: length {dim} is not a power of two >= 2")
    if n_qubits is not None and n != n_qubits:
        raise ValueError(f"{name}: expected {n_qubits} qubits, got {n}")
    norm_sq = float(np.sum(np.abs(arr) ** 2))
    if not np.isfinite(norm_sq) or abs(norm_sq - 1.0) > atol:
        raise ValueError(f"{name}: squared norm {norm_sq!r} deviates from 1 "
                         f"by more than {atol}")
    return np.ascontiguousarray(arr)


def check_state_pair(X, n_qubits: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Validate a pair of equal-size states given as a (2, 2**n) array-like."""
    X = np.asarray(X, dtype=np.complex128)
    if X.ndim != 2 or X.shape[0] != 2:
        raise ValueError(f"expected a (2, 2**n) array of two states, got shape {X.shape}")
    a = check_state_array(X[0], n_qubits, name="state 0")
    b = check_state_array(X[1], a.shape[0].bit_length() - 1, name="state 1")
    return a, b


def check_unitary(g, dim: int | None = None, *, atol: float = 1e-10,
                  name: str = "gate") -> np.ndarray:
    """Validate a unitary matrix (U†U = I within ``atol`` entrywise)."""
    mat = np.asarray(g, dtype=np.complex128)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError(f"{name}: expected a square matrix, got shape {mat.shape}")
    d = mat.shape[0]
    if dim is not None and d != dim:
        raise ValueError(f"{name}: expected dimension {dim}, got {d}")
    err = np.max(np.abs(mat.conj().T @ mat - np.eye(d)))
    if not err < atol:
        raise ValueError(f"{name}: not unitary (max |U†U - I| = {err:.2e})")
    return mat


def check_finite_angles(*angles: float) -> tuple[float, ...]:
    """Validate rotation angles (finite reals, radians)."""
    out = []
    for i, a in enumerate(angles):
        a = float(a)
        if not np.isfinite(a):
            raise ValueError(f"angle {i} is not finite: {a!r}")
        out.append(a)
    return tuple(out)
