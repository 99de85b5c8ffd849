"""Parameterized circuit layouts for every supported architecture.

A layout is an immutable, deterministic function of (architecture, n_qubits,
depth): an ordered list of layers, each a tuple of gate slots carrying the
qubit wiring and the indices into a flat parameter vector. Layouts never hold
parameter values, so one layout can be reused across restarts and sweeps.

Depth conventions:

* For architectures built from universal two-qubit gates (brickwall, prism,
  polygon, qcnn, ttn, mera), ``depth`` counts gate layers, and each layer
  costs 3 CNOT layers in a physical realization, so the entangler-layer count
  is ``3 * depth``.
* For ``svqc`` / ``real-svqc``, ``depth`` counts CZ brick layers directly
  (the entangler-layer count equals ``depth``). Every CZ brick layer is
  preceded by a rotation on each qubit and the circuit ends with one final
  rotation layer; after every second brick layer an extra CZ on (n-1, 0)
  closes the boundary.
* ``depth = 0`` is the empty (identity) circuit for extensive architectures
  and the sVQC family (a single rotation layer would carry parameters, so the
  empty circuit is truly empty).

The universal two-qubit gate consumes 15 angles:

    pre:   R(p0,p1,p2) on a, R(p3,p4,p5) on b
    CNOT (control b, target a)
    mid:   RZ(p6) on a, RY(p7) on b
    CNOT (control a, target b)
    mid:   RY(p8) on b
    CNOT (control b, target a)
    post:  R(p9,p10,p11) on a, R(p12,p13,p14) on b

This arrangement covers SU(4) up to a global phase (the same-orientation
CNOT variant does not: its middle rotations commute through the entanglers
and collapse to a single nonlocal angle). At all-zero angles the three fixed
CNOTs compose to SWAP; the parameters ``IDENTITY_2Q_PARAMS`` realize the
identity exactly and are used to embed a shallow trained circuit into a
deeper one.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import CapacityError
from .statevec import (
    StateVector,
    _apply_1q,
    _apply_2q,
    rotation_gate,
    ry_gate,
    rz_gate,
)
from .validation import check_finite_angles

__all__ = [
    "Architecture", "GateKind", "GateSlot", "CircuitLayout",
    "universal_two_qubit", "universal_two_qubit_batch", "slot_matrices_batch",
    "IDENTITY_2Q_PARAMS",
    "build_layout", "max_depth", "apply_circuit", "count_entangler_layers",
    "parameter_count_formula", "gate_sequence", "slot_matrix", "embed_params",
    "layout_to_json", "layout_from_json",
    "CNOT_AB", "CNOT_BA", "CZ",
]

CNOT_AB = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]],
                   dtype=np.complex128)  # control = first (more significant) qubit
CNOT_BA = np.array([[1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0]],
                   dtype=np.complex128)  # control = second qubit
CZ = np.diag([1, 1, 1, -1]).astype(np.complex128)

_HALF_PI = math.pi / 2

#: Parameter vector at which ``universal_two_qubit`` equals the identity
#: (up to a global phase exp(-3i*pi/4)).
IDENTITY_2Q_PARAMS = np.array(
    [0, 0, 0, 0, 0, 0,
     _HALF_PI, _HALF_PI, _HALF_PI,
     _HALF_PI, math.pi, 0, _HALF_PI, math.pi, 0],
    dtype=np.float64,
)


class Architecture(Enum):
    BRICKWALL_OPEN = "brickwall-open"
    BRICKWALL_PERIODIC = "brickwall-periodic"
    BRICKWALL_TI = "brickwall-ti"
    PRISM = "prism"
    POLYGON = "polygon"
    QCNN = "qcnn"
    TTN = "ttn"
    MERA = "mera"
    SVQC = "svqc"
    REAL_SVQC = "real-svqc"

    @classmethod
    def from_string(cls, name: str) -> "Architecture":
        try:
            return cls(name)
        except ValueError:
            options = ", ".join(a.value for a in cls)
            raise ValueError(f"unknown architecture {name!r}; options: {options}") from None


#: Architectures whose gate count per layer does not shrink with depth.
EXTENSIVE = frozenset({
    Architecture.BRICKWALL_OPEN, Architecture.BRICKWALL_PERIODIC,
    Architecture.BRICKWALL_TI, Architecture.PRISM, Architecture.POLYGON,
    Architecture.SVQC, Architecture.REAL_SVQC,
})


class GateKind(Enum):
    U2Q = "u2q"          # universal two-qubit template, 15 params
    ROT3 = "rot3"        # general single-qubit rotation, 3 params
    ROT_Y = "rot_y"      # Y rotation, 1 param
    CZ = "cz"            # fixed
    CNOT = "cnot"        # fixed

    @property
    def n_params(self) -> int:
        return {"u2q": 15, "rot3": 3, "rot_y": 1, "cz": 0, "cnot": 0}[self.value]


@dataclass(frozen=True)
class GateSlot:
    kind: GateKind
    qubits: tuple[int, ...]
    param_indices: tuple[int, ...]

    def __post_init__(self):
        if len(self.param_indices) != self.kind.n_params:
            raise ValueError(f"{self.kind.value} slot needs {self.kind.n_params} "
                             f"parameter indices, got {len(self.param_indices)}")


@dataclass(frozen=True)
class CircuitLayout:
    architecture: Architecture
    n_qubits: int
    depth: int
    layers: tuple[tuple[GateSlot, ...], ...]
    param_count: int
    entangler_layers: int

    @property
    def slots(self) -> tuple[GateSlot, ...]:
        return tuple(s for layer in self.layers for s in layer)


def universal_two_qubit(params) -> np.ndarray:
    """4x4 unitary from the 15-parameter three-CNOT template."""
    p = np.asarray(params, dtype=np.float64).ravel()
    if p.shape[0] != 15:
        raise ValueError(f"expected 15 parameters, got {p.shape[0]}")
    check_finite_angles(*p)
    pre = np.kron(rotation_gate(*p[0:3]), rotation_gate(*p[3:6]))
    mid1 = np.kron(rz_gate(p[6]), ry_gate(p[7]))
    mid2 = np.kron(np.eye(2), ry_gate(p[8]))
    post = np.kron(rotation_gate(*p[9:12]), rotation_gate(*p[12:15]))
    return post @ CNOT_BA @ mid2 @ CNOT_AB @ mid1 @ CNOT_BA @ pre


def _rz_batch(theta: np.ndarray) -> np.ndarray:
    p = np.exp(-0.5j * theta)
    out = np.zeros(theta.shape + (2, 2), dtype=np.complex128)
    out[..., 0, 0] = p
    out[..., 1, 1] = np.conj(p)
    return out


def _ry_batch(theta: np.ndarray) -> np.ndarray:
    c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
    out = np.empty(theta.shape + (2, 2), dtype=np.complex128)
    out[..., 0, 0] = c
    out[..., 0, 1] = -s
    out[..., 1, 0] = s
    out[..., 1, 1] = c
    return out


def _rot3_batch(thetas: np.ndarray) -> np.ndarray:
    return _rz_batch(thetas[..., 0]) @ _ry_batch(thetas[..., 1]) @ _rz_batch(thetas[..., 2])


def _kron_batch(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    batch = a.shape[0]
    out = np.einsum("bij,bkl->bikjl", a, b)
    return out.reshape(batch, 4, 4)


def universal_two_qubit_batch(params: np.ndarray) -> np.ndarray:
    """Vectorized template evaluation: (batch, 15) angles -> (batch, 4, 4)."""
    p = np.asarray(params, dtype=np.float64)
    pre = _kron_batch(_rot3_batch(p[:, 0:3]), _rot3_batch(p[:, 3:6]))
    eye = np.broadcast_to(np.eye(2, dtype=np.complex128), (p.shape[0], 2, 2))
    mid1 = _kron_batch(_rz_batch(p[:, 6]), _ry_batch(p[:, 7]))
    mid2 = _kron_batch(eye, _ry_batch(p[:, 8]))
    post = _kron_batch(_rot3_batch(p[:, 9:12]), _rot3_batch(p[:, 12:15]))
    return post @ CNOT_BA @ mid2 @ CNOT_AB @ mid1 @ CNOT_BA @ pre


def slot_matrices_batch(kind: GateKind, slot_params: np.ndarray) -> np.ndarray:
    """(batch, n_params) angles for one slot kind -> (batch, dim, dim) gates."""
    if kind is GateKind.U2Q:
        return universal_two_qubit_batch(slot_params)
    if kind is GateKind.ROT3:
        return _rot3_batch(slot_params)
    if kind is GateKind.ROT_Y:
        return _ry_batch(slot_params[:, 0])
    raise ValueError(f"{kind.value} slots carry no parameters")


class _Builder:
    """Accumulates layers and hands out parameter indices."""

    def __init__(self):
        self.layers: list[tuple[GateSlot, ...]] = []
        self.next_index = 0

    def fresh(self, count: int) -> tuple[int, ...]:
        idx = tuple(range(self.next_index, self.next_index + count))
        self.next_index += count
        return idx

    def layer(self, slots: list[GateSlot]):
        self.layers.append(tuple(slots))


def _brick_pairs(n: int, layer_index: int, periodic: bool) -> list[tuple[int, int]]:
    """Neighbor pairs of one brick layer; odd layers start at qubit 0."""
    if layer_index % 2 == 1:
        pairs = [(i, i + 1) for i in range(0, n - 1, 2)]
    else:
        pairs = [(i, i + 1) for i in range(1, n - 1, 2)]
        if periodic and n % 2 == 0:
            pairs.append((n - 1, 0))
    return pairs


def _require_even(arch: Architecture, n: int):
    if n % 2 != 0:
        raise ValueError(f"{arch.value} needs an even qubit count, got n={n}")


def _require_pow2(arch: Architecture, n: int):
    if n < 2 or n & (n - 1):
        raise ValueError(f"{arch.value} needs a power-of-two qubit count, got n={n}")


def max_depth(arch: Architecture, n: int) -> int | None:
    """Structural maximum depth, or None for extensive architectures."""
    if arch in EXTENSIVE:
        return None
    if arch is Architecture.QCNN:
        return 2 * math.ceil(math.log2(n))
    _require_pow2(arch, n)
    levels = int(math.log2(n))
    if arch is Architecture.TTN:
        return levels
    return 2 * levels - 1  # MERA: the top level has no disentangler layer


def _build_qcnn(b: _Builder, n: int, depth: int):
    active = list(range(n))
    for layer_index in range(1, depth + 1):
        pairs = [(active[2 * i], active[2 * i + 1]) for i in range(len(active) // 2)]
        b.layer([GateSlot(GateKind.U2Q, p, b.fresh(15)) for p in pairs])
        if layer_index % 2 == 0:  # pooling: entangle then drop the odd partners
            active = active[0::2]


def _build_ttn(b: _Builder, n: int, depth: int):
    active = list(range(n))
    for _ in range(depth):
        pairs = [(active[2 * i], active[2 * i + 1]) for i in range(len(active) // 2)]
        b.layer([GateSlot(GateKind.U2Q, p, b.fresh(15)) for p in pairs])
        active = active[0::2]


def _build_mera(b: _Builder, n: int, depth: int):
    active = list(range(n))
    built = 0
    while built < depth:
        if len(active) > 2:
            dis = [(active[2 * i + 1], active[2 * i + 2])
                   for i in range((len(active) - 1) // 2)]
            b.layer([GateSlot(GateKind.U2Q, p, b.fresh(15)) for p in dis])
            built += 1
            if built == depth:
                break
        iso = [(active[2 * i], active[2 * i + 1]) for i in range(len(active) // 2)]
        b.layer([GateSlot(GateKind.U2Q, p, b.fresh(15)) for p in iso])
        active = active[0::2]
        built += 1


def _build_svqc(b: _Builder, n: int, depth: int, real: bool):
    kind = GateKind.ROT_Y if real else GateKind.ROT3
    width = kind.n_params

    def rotation_layer():
        b.layer([GateSlot(kind, (q,), b.fresh(width)) for q in range(n)])

    if depth == 0:
        return
    for layer_index in range(1, depth + 1):
        rotation_layer()
        slots = [GateSlot(GateKind.CZ, p, ()) for p in _brick_pairs(n, layer_index, False)]
        if layer_index % 2 == 0:
            slots.append(GateSlot(GateKind.CZ, (n - 1, 0), ()))
        b.layer(slots)
    rotation_layer()


def build_layout(arch: Architecture, n: int, depth: int) -> CircuitLayout:
    """Deterministic layout for (architecture, n qubits, depth)."""
    if isinstance(arch, str):
        arch = Architecture.from_string(arch)
    if n < 2:
        raise ValueError(f"need at least 2 qubits, got n={n}")
    if depth < 0:
        raise ValueError(f"depth must be >= 0, got {depth}")

    cap = max_depth(arch, n)
    if cap is not None and depth > cap:
        raise CapacityError(f"{arch.value} on {n} qubits admits depth <= {cap}, "
                            f"got {depth}")

    b = _Builder()
    if arch in (Architecture.BRICKWALL_OPEN, Architecture.BRICKWALL_PERIODIC):
        periodic = arch is Architecture.BRICKWALL_PERIODIC
        if periodic:
            _require_even(arch, n)
        for layer_index in range(1, depth + 1):
            pairs = _brick_pairs(n, layer_index, periodic)
            b.layer([GateSlot(GateKind.U2Q, p, b.fresh(15)) for p in pairs])
    elif arch is Architecture.BRICKWALL_TI:
        _require_even(arch, n)
        for layer_index in range(1, depth + 1):
            shared = b.fresh(15)
            pairs = _brick_pairs(n, layer_index, True)
            b.layer([GateSlot(GateKind.U2Q, p, shared) for p in pairs])
    elif arch is Architecture.PRISM:
        _require_even(arch, n)
        for layer_index in range(1, depth + 1):
            pairs = _brick_pairs(n, layer_index, False)
            a = layer_index % n
            pairs.append((a, (a + n // 2) % n))
            b.layer([GateSlot(GateKind.U2Q, p, b.fresh(15)) for p in pairs])
    elif arch is Architecture.POLYGON:
        _require_even(arch, n)
        for layer_index in range(1, depth + 1):
            stride = (layer_index - 1) % (n // 2) + 1
            pairs = [(i, (i + stride) % n) for i in range(n)]
            b.layer([GateSlot(GateKind.U2Q, p, b.fresh(15)) for p in pairs])
    elif arch is Architecture.QCNN:
        _build_qcnn(b, n, depth)
    elif arch is Architecture.TTN:
        _build_ttn(b, n, depth)
    elif arch is Architecture.MERA:
        _build_mera(b, n, depth)
    elif arch in (Architecture.SVQC, Architecture.REAL_SVQC):
        _build_svqc(b, n, depth, real=arch is Architecture.REAL_SVQC)
    else:  # pragma: no cover
        raise ValueError(f"unhandled architecture {arch}")

    if arch in (Architecture.SVQC, Architecture.REAL_SVQC):
        d_star = depth
    else:
        d_star = 3 * sum(1 for layer in b.layers
                         if any(s.kind is GateKind.U2Q for s in layer))
    return CircuitLayout(arch, n, depth, tuple(b.layers), b.next_index, d_star)


def count_entangler_layers(layout: CircuitLayout) -> int:
    """Number of CNOT/CZ layers in a physical realization of the layout."""
    return layout.entangler_layers


def parameter_count_formula(arch: Architecture, n: int, depth: int) -> int:
    """Documented closed form for the parameter count of ``build_layout``."""
    if isinstance(arch, str):
        arch = Architecture.from_string(arch)
    odd_layers = (depth + 1) // 2
    even_layers = depth // 2
    if arch is Architecture.BRICKWALL_OPEN:
        return 15 * (odd_layers * (n // 2) + even_layers * ((n - 1) // 2))
    if arch is Architecture.BRICKWALL_PERIODIC:
        return 15 * depth * (n // 2)
    if arch is Architecture.BRICKWALL_TI:
        return 15 * depth
    if arch is Architecture.PRISM:
        return 15 * (odd_layers * (n // 2) + even_layers * ((n - 1) // 2) + depth)
    if arch is Architecture.POLYGON:
        return 15 * depth * n
    if arch is Architecture.SVQC:
        return 3 * n * (depth + 1) if depth > 0 else 0
    if arch is Architecture.REAL_SVQC:
        return n * (depth + 1) if depth > 0 else 0
    if arch in (Architecture.QCNN, Architecture.TTN, Architecture.MERA):
        # recurrence over the active-qubit count
        total = 0
        active = n
        if arch is Architecture.QCNN:
            for layer_index in range(1, depth + 1):
                total += active // 2
                if layer_index % 2 == 0:
                    active = (active + 1) // 2
        elif arch is Architecture.TTN:
            for _ in range(depth):
                total += active // 2
                active //= 2
        else:
            built = 0
            while built < depth:
                if active > 2:
                    total += (active - 1) // 2
                    built += 1
                    if built == depth:
                        break
                total += active // 2
                active //= 2
                built += 1
        return 15 * total
    raise ValueError(f"unhandled architecture {arch}")


def slot_matrix(slot: GateSlot, params: np.ndarray) -> np.ndarray:
    kind = slot.kind
    if kind is GateKind.U2Q:
        return universal_two_qubit(params[list(slot.param_indices)])
    if kind is GateKind.ROT3:
        i, j, k = slot.param_indices
        return rotation_gate(params[i], params[j], params[k])
    if kind is GateKind.ROT_Y:
        return ry_gate(params[slot.param_indices[0]])
    if kind is GateKind.CZ:
        return CZ
    return CNOT_AB


def gate_sequence(layout: CircuitLayout, params) -> list[tuple[tuple[int, ...], np.ndarray]]:
    """Flatten a layout into (qubits, matrix) pairs in application order."""
    params = np.asarray(params, dtype=np.float64).ravel()
    if params.shape[0] != layout.param_count:
        raise ValueError(f"layout expects {layout.param_count} parameters, "
                         f"got {params.shape[0]}")
    return [(slot.qubits, slot_matrix(slot, params)) for slot in layout.slots]


def apply_circuit(layout: CircuitLayout, params, state: StateVector) -> StateVector:
    """Apply every slot of the layout in order to ``state``."""
    if state.n_qubits != layout.n_qubits:
        raise ValueError(f"layout is for {layout.n_qubits} qubits, state has "
                         f"{state.n_qubits}")
    amps = state.amplitudes
    n = state.n_qubits
    for qubits, mat in gate_sequence(layout, params):
        if len(qubits) == 1:
            amps = _apply_1q(amps, n, qubits[0], mat)
        else:
            amps = _apply_2q(amps, n, qubits[0], qubits[1], mat)
    return StateVector(n, amps)


def embed_params(shallow: CircuitLayout, shallow_params, deep: CircuitLayout) -> np.ndarray:
    """Parameters for ``deep`` that reproduce ``shallow``'s unitary.

    Requires the two layouts to share architecture and qubit count, with
    ``deep`` at least as deep; the shallow circuit's layers are copied
    slot-by-slot and every remaining universal-gate slot is set to the exact
    identity parameters. Supported for layouts whose extra slots are all
    universal gates (the u2q architectures).
    """
    if (shallow.architecture is not deep.architecture
            or shallow.n_qubits != deep.n_qubits or shallow.depth > deep.depth):
        raise ValueError("embedding needs same architecture/qubits and deep >= shallow")
    shallow_params = np.asarray(shallow_params, dtype=np.float64).ravel()
    if shallow_params.shape[0] != shallow.param_count:
        raise ValueError("parameter length does not match the shallow layout")
    out = np.empty(deep.param_count, dtype=np.float64)
    for layer in deep.layers[shallow.depth:]:
        for slot in layer:
            if slot.kind is not GateKind.U2Q:
                raise ValueError("identity embedding only supported for "
                                 "universal-gate architectures")
            out[list(slot.param_indices)] = IDENTITY_2Q_PARAMS
    for d_layer, s_layer in zip(deep.layers[:shallow.depth], shallow.layers):
        for d_slot, s_slot in zip(d_layer, s_layer):
            if d_slot.qubits != s_slot.qubits or d_slot.kind is not s_slot.kind:
                raise ValueError("layouts disagree on the shared layers")
            out[list(d_slot.param_indices)] = shallow_params[list(s_slot.param_indices)]
    return out


def layout_to_json(layout: CircuitLayout) -> str:
    """Serialize a layout to the documented JSON schema."""
    doc = {
        "architecture": layout.architecture.value,
        "n_qubits": layout.n_qubits,
        "depth": layout.depth,
        "param_count": layout.param_count,
        "entangler_layers": layout.entangler_layers,
        "layers": [
            [{"kind": s.kind.value, "qubits": list(s.qubits),
              "params": list(s.param_indices)} for s in layer]
            for layer in layout.layers
        ],
    }
    return json.dumps(doc, indent=2)


def layout_from_json(text: str) -> CircuitLayout:
    doc = json.loads(text)
    layers = tuple(
        tuple(GateSlot(GateKind(s["kind"]), tuple(s["qubits"]), tuple(s["params"]))
              for s in layer)
        for layer in doc["layers"]
    )
    return CircuitLayout(Architecture.from_string(doc["architecture"]),
                         int(doc["n_qubits"]), int(doc["depth"]), layers,
                         int(doc["param_count"]), int(doc["entangler_layers"]))
