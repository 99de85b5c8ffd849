"""Input-state families: Haar states, random-circuit ensembles, TFIM ground states.

Ensemble kinds:

* ``haar`` — |psi> = U|0...0> with U Haar on U(2**n).
* ``local-random`` — open-boundary brickwall of depth ``d0`` with i.i.d. Haar
  two-qubit gates applied to |0...0>.
* ``ti-local-random`` — periodic-boundary brickwall where every gate within a
  layer is the *same* Haar two-qubit sample, which makes per-sample two-site
  cyclic covariance exact by construction.
* ``tfim-ground`` — ground state of H = -sum_i Z_i Z_{i+1} + g sum_i X_i with
  periodic boundary, from dense diagonalization.

Sampling is pure given (spec, sample index): the stream for sample ``i`` is
derived from (spec.seed, i), so sweeps parallelize without coordination.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from . import rng as rngmod
from .errors import CapacityError
from .statevec import StateVector, _apply_2q, haar_unitary

__all__ = [
    "ENSEMBLE_KINDS", "EnsembleSpec", "TFIMSpectrumSlice",
    "sample_state", "sample_states", "mean_overlap",
    "tfim_hamiltonian", "tfim_ground", "tfim_ground_energy_free_fermion",
    "save_states", "load_states",
]

ENSEMBLE_KINDS = ("haar", "local-random", "ti-local-random", "tfim-ground")

_TFIM_MAX_QUBITS = 12  # dense-diagonalization budget


@dataclass(frozen=True)
class EnsembleSpec:
    kind: str
    n_qubits: int
    d0: int | None = None   # preparation depth for the circuit ensembles
    g: float | None = None  # transverse field for tfim-ground
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ENSEMBLE_KINDS:
            raise ValueError(f"unknown ensemble kind {self.kind!r}; "
                             f"options: {', '.join(ENSEMBLE_KINDS)}")
        if self.n_qubits < 1:
            raise ValueError(f"need at least one qubit, got {self.n_qubits}")
        if self.kind in ("local-random", "ti-local-random"):
            if self.d0 is None or self.d0 < 1:
                raise ValueError(f"{self.kind} needs preparation depth d0 >= 1")
            if self.n_qubits < 2:
                raise ValueError(f"{self.kind} needs at least two qubits")
            if self.kind == "ti-local-random" and self.n_qubits % 2 != 0:
                raise ValueError("ti-local-random needs an even qubit count")
        if self.kind == "tfim-ground":
            if self.g is None or not np.isfinite(self.g):
                raise ValueError("tfim-ground needs a finite field strength g")

    @property
    def parameter(self) -> float:
        """The single sweep parameter (d0 or g), NaN when absent."""
        if self.kind in ("local-random", "ti-local-random"):
            return float(self.d0)
        if self.kind == "tfim-ground":
            return float(self.g)
        return float("nan")


def _brickwall_random_state(n: int, d0: int, rng: np.random.Generator,
                            translation_invariant: bool) -> np.ndarray:
    amps = np.zeros(2**n, dtype=np.complex128)
    amps[0] = 1.0
    for layer in range(1, d0 + 1):
        if layer % 2 == 1:
            pairs = [(i, i + 1) for i in range(0, n - 1, 2)]
        else:
            pairs = [(i, i + 1) for i in range(1, n - 1, 2)]
            if translation_invariant:
                pairs.append((n - 1, 0))
        if translation_invariant:
            shared = haar_unitary(4, rng)
            gates = [shared] * len(pairs)
        else:
            gates = [haar_unitary(4, rng) for _ in pairs]
        for (qa, qb), gate in zip(pairs, gates):
            amps = _apply_2q(amps, n, qa, qb, gate)
    return amps


def sample_state(spec: EnsembleSpec, index: int = 0) -> StateVector:
    """Draw sample ``index`` of the ensemble. Same (spec, index) -> same bits."""
    n = spec.n_qubits
    if spec.kind == "tfim-ground":
        return tfim_ground(n, spec.g).ground
    rng = rngmod.generator(spec.seed, index)
    if spec.kind == "haar":
        u = haar_unitary(2**n, rng)
        return StateVector(n, np.ascontiguousarray(u[:, 0]))
    amps = _brickwall_random_state(n, spec.d0, rng,
                                   spec.kind == "ti-local-random")
    return StateVector(n, amps)


def sample_states(spec: EnsembleSpec, count: int, start_index: int = 0) -> list[StateVector]:
    return [sample_state(spec, start_index + i) for i in range(count)]


def mean_overlap(spec: EnsembleSpec, pairs: int) -> tuple[float, float]:
    """Monte-Carlo mean of |<psi0|psi1>|^2 over independent pairs, with its
    standard error."""
    if pairs < 1:
        raise ValueError(f"need at least one pair, got {pairs}")
    vals = np.empty(pairs)
    for i in range(pairs):
        a = sample_state(spec, 2 * i)
        b = sample_state(spec, 2 * i + 1)
        vals[i] = abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2
    stderr = float(vals.std(ddof=1) / np.sqrt(pairs)) if pairs > 1 else float("inf")
    return float(vals.mean()), stderr


def tfim_hamiltonian(n: int, g: float) -> np.ndarray:
    """Dense H = -sum_i Z_i Z_{i+1} + g sum_i X_i, periodic boundary.

    The periodic sum runs over i = 0..n-1, so at n=2 the single bond is
    counted twice.
    """
    if n < 2:
        raise ValueError(f"need at least two qubits, got n={n}")
    dim = 2**n
    j = np.arange(dim)
    bits = (j[:, None] >> (n - 1 - np.arange(n))[None, :]) & 1
    z = 1.0 - 2.0 * bits
    diag = -np.sum(z * np.roll(z, -1, axis=1), axis=1)
    h = np.diag(diag)
    for q in range(n):
        flipped = j ^ (1 << (n - 1 - q))
        h[j, flipped] += g
    return h


@dataclass(frozen=True)
class TFIMSpectrumSlice:
    """Two lowest TFIM levels plus the (realified, sign-fixed) ground state."""

    e0: float
    e1: float
    ground: StateVector
    degenerate: bool = False


def _spin_flip(vec: np.ndarray) -> np.ndarray:
    """Apply prod_i X_i: flips every bit of the basis index."""
    return vec[::-1].copy()


def _canonicalize(vec: np.ndarray) -> np.ndarray:
    pivot = int(np.argmax(np.abs(vec)))
    phase = vec[pivot] / abs(vec[pivot])
    real = vec / phase
    residue = float(np.max(np.abs(real.imag)))
    if residue > 1e-10:
        raise AssertionError(f"TFIM ground state has imaginary residue {residue:.2e}")
    real = real.real.astype(np.float64)
    first = int(np.argmax(np.abs(real) > 1e-12))
    if real[first] < 0:
        real = -real
    return real.astype(np.complex128)


def tfim_ground(n: int, g: float) -> TFIMSpectrumSlice:
    """Ground state and lowest gap of the periodic TFIM at field ``g``.

    In a (near-)degenerate ground space (gap below 1e-10, deep in the
    ferromagnetic phase) the returned state is the spin-flip-symmetric
    combination, selected by projecting the lowest eigenvector onto the
    flip-even sector; the result is flagged ``degenerate``.
    """
    if n > _TFIM_MAX_QUBITS:
        raise CapacityError(f"dense TFIM diagonalization supports n <= "
                            f"{_TFIM_MAX_QUBITS}, got {n}")
    h = tfim_hamiltonian(n, g)
    evals, evecs = np.linalg.eigh(h)
    e0, e1 = float(evals[0]), float(evals[1])
    degenerate = (e1 - e0) < 1e-10
    v = evecs[:, 0].astype(np.complex128)
    if degenerate:
        sym = v + _spin_flip(v)
        if np.linalg.norm(sym) < 1e-8:
            w = evecs[:, 1].astype(np.complex128)
            sym = w + _spin_flip(w)
        v = sym / np.linalg.norm(sym)
    ground = StateVector(n, _canonicalize(v))
    return TFIMSpectrumSlice(e0, e1, ground, degenerate)


def tfim_ground_energy_free_fermion(n: int, g: float) -> float:
    """Exact TFIM ground energy from the Jordan-Wigner free-fermion solution.

    Independent momentum-space cross-check for ``tfim_ground``: the
    even-fermion-parity (antiperiodic) sector vacuum, which is the global
    ground state for every field strength,

        E0(n, g) = -sum_{m=0}^{n-1} sqrt(1 + g^2 - 2|g| cos((2m+1) pi / n)).
    """
    if n < 2:
        raise ValueError(f"need at least two qubits, got n={n}")
    k = (2 * np.arange(n) + 1) * np.pi / n
    return float(-np.sum(np.sqrt(1.0 + g * g - 2.0 * abs(g) * np.cos(k))))


_MAGIC = b"VQCSTATE"
_HEADER = struct.Struct("<8sII16sdQQ")  # magic, version, n, kind, parameter, seed, count


def save_states(path, spec: EnsembleSpec, states: list[StateVector]) -> None:
    """Write states to the documented binary cache format.

    Layout: header (magic ``VQCSTATE``, version, n, kind as 16-byte padded
    ascii, ensemble parameter as float64, seed, count), then ``count`` records
    of 2**n amplitudes, each a little-endian (float64 re, float64 im) pair.
    """
    for s in states:
        if s.n_qubits != spec.n_qubits:
            raise ValueError("state qubit count does not match the spec")
    header = _HEADER.pack(_MAGIC, 1, spec.n_qubits, spec.kind.encode().ljust(16, b"\0"),
                          spec.parameter, spec.seed, len(states))
    with open(path, "wb") as fh:
        fh.write(header)
        for s in states:
            pairs = np.empty((2**spec.n_qubits, 2), dtype="<f8")
            pairs[:, 0] = s.amplitudes.real
            pairs[:, 1] = s.amplitudes.imag
            fh.write(pairs.tobytes())


def load_states(path) -> tuple[EnsembleSpec, list[StateVector]]:
    with open(path, "rb") as fh:
        header = fh.read(_HEADER.size)
        magic, version, n, kind_raw, parameter, seed, count = _HEADER.unpack(header)
        if magic != _MAGIC or version != 1:
            raise ValueError(f"{path}: not a version-1 state cache file")
        kind = kind_raw.rstrip(b"\0").decode()
        d0 = int(parameter) if kind in ("local-random", "ti-local-random") else None
        g = float(parameter) if kind == "tfim-ground" else None
        spec = EnsembleSpec(kind, n, d0=d0, g=g, seed=int(seed))
        dim = 2**n
        states = []
        for _ in range(count):
            pairs = np.frombuffer(fh.read(16 * dim), dtype="<f8").reshape(dim, 2)
            states.append(StateVector(n, (pairs[:, 0] + 1j * pairs[:, 1]).astype(np.complex128)))
    return spec, states
