"""Operator evolution, Pauli decomposition, and operator-size statistics."""

import numpy as np
import pytest

from vqcdisc import rng as rngmod
from vqcdisc.circuits import build_layout
from vqcdisc.errors import CapacityError
from vqcdisc.scrambling import (
    PauliDecomposition,
    avg_operator_size,
    evolve_operator,
    operator_size,
    pauli_decompose,
    pauli_string_matrix,
    pauli_weights,
    random_circuit_gates,
)
from vqcdisc.statevec import PAULI_X, PAULI_Z, embed_gate, haar_unitary

CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]],
                dtype=complex)


def _decompose_by_traces(m, n):
    """Independent oracle: alpha_S = Tr(S M) / 2**n string by string."""
    coeffs = np.empty(4**n, dtype=complex)
    for code in range(4**n):
        s = pauli_string_matrix(n, code)
        coeffs[code] = np.trace(s @ m) / 2**n
    return coeffs


class TestEvolveOperator:
    def test_identity_circuit_keeps_operator(self):
        layout = build_layout("brickwall-open", 4, 0)
        m = evolve_operator(layout, gates=[])
        np.testing.assert_allclose(m, embed_gate(4, (2,), PAULI_Z), atol=1e-14)

    def test_cnot_z_on_control_commutes(self):
        # 4x4 conjugation oracle: CNOT^dag (Z x I) CNOT = Z x I
        z_ctrl = np.kron(PAULI_Z, np.eye(2))
        np.testing.assert_allclose(CNOT.conj().T @ z_ctrl @ CNOT, z_ctrl, atol=1e-14)
        layout = build_layout("brickwall-open", 2, 1)
        m = evolve_operator(layout, gates=[CNOT],
                            initial=embed_gate(2, (0,), PAULI_Z))
        np.testing.assert_allclose(m, embed_gate(2, (0,), PAULI_Z), atol=1e-14)

    def test_cnot_z_on_target_spreads(self):
        z_tgt = np.kron(np.eye(2), PAULI_Z)
        zz = np.kron(PAULI_Z, PAULI_Z)
        np.testing.assert_allclose(CNOT.conj().T @ z_tgt @ CNOT, zz, atol=1e-14)
        layout = build_layout("brickwall-open", 2, 1)
        m = evolve_operator(layout, gates=[CNOT],
                            initial=embed_gate(2, (1,), PAULI_Z))
        dec = pauli_decompose(m, 2)
        assert dec.coefficient("ZZ") == pytest.approx(1.0)
        assert operator_size(dec) == pytest.approx(2.0)

    def test_capacity_error(self):
        layout = build_layout("brickwall-open", 9, 1)
        with pytest.raises(CapacityError):
            evolve_operator(layout, params=np.zeros(layout.param_count))


class TestPauliDecompose:
    def test_single_x(self):
        dec = pauli_decompose(embed_gate(2, (0,), PAULI_X), 2)
        assert dec.coefficient("XI") == pytest.approx(1.0)
        others = np.abs(dec.coefficients).sum() - abs(dec.coefficient("XI"))
        assert others < 1e-12

    def test_two_term_combination(self):
        m = (np.kron(PAULI_Z, PAULI_Z) + np.kron(PAULI_X, np.eye(2))) / np.sqrt(2)
        dec = pauli_decompose(m, 2)
        assert dec.coefficient("ZZ") == pytest.approx(1 / np.sqrt(2))
        assert dec.coefficient("XI") == pytest.approx(1 / np.sqrt(2))

    def test_matches_trace_oracle(self, rng):
        n = 3
        m = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
        dec = pauli_decompose(m, n)
        np.testing.assert_allclose(dec.coefficients, _decompose_by_traces(m, n),
                                   atol=1e-12)

    def test_reconstruction(self, rng):
        n = 3
        layout = build_layout("brickwall-open", n, 2)
        gates = random_circuit_gates(layout, rng)
        m = evolve_operator(layout, gates=gates)
        dec = pauli_decompose(m, n)
        rebuilt = np.zeros((8, 8), dtype=complex)
        for code in range(4**n):
            if abs(dec.coefficients[code]) > 1e-14:
                rebuilt += dec.coefficients[code] * pauli_string_matrix(n, code)
        np.testing.assert_allclose(rebuilt, m, atol=1e-8)

    def test_evolved_z_weight_and_tracelessness(self, rng):
        n = 4
        layout = build_layout("brickwall-open", n, 3)
        for _ in range(5):
            gates = random_circuit_gates(layout, rng)
            dec = pauli_decompose(evolve_operator(layout, gates=gates), n)
            assert abs(dec.total_weight() - 1.0) < 1e-8
            assert abs(dec.identity_coefficient()) < 1e-10

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            pauli_decompose(np.eye(8), 2)


class TestOperatorSize:
    def test_unevolved_z_size_one(self):
        dec = pauli_decompose(embed_gate(4, (2,), PAULI_Z), 4)
        assert operator_size(dec) == pytest.approx(1.0)

    def test_rejects_unnormalized(self):
        dec = PauliDecomposition(2, np.zeros(16, dtype=complex))
        with pytest.raises(ValueError):
            operator_size(dec)

    def test_weights_table(self):
        w = pauli_weights(2)
        assert w[0] == 0            # II
        assert w[0b0100] == 1       # XI
        assert w[0b0101] == 2       # XX
        assert list(pauli_weights(1)) == [0, 1, 1, 1]

    def test_size_bounds_random_circuits(self, rng):
        n = 4
        layout = build_layout("brickwall-open", n, 4)
        for _ in range(5):
            gates = random_circuit_gates(layout, rng)
            dec = pauli_decompose(evolve_operator(layout, gates=gates), n)
            size = operator_size(dec)
            assert 1.0 - 1e-9 <= size <= n + 1e-9


def _causal_cone(layout, start):
    support = {start}
    for slot in reversed(layout.slots):
        if support & set(slot.qubits):
            support |= set(slot.qubits)
    return support


class TestLightCone:
    def test_no_weight_outside_cone(self):
        n, depth = 6, 2
        layout = build_layout("brickwall-open", n, depth)
        cone = _causal_cone(layout, n // 2)
        assert cone != set(range(n))  # the test is vacuous if the cone fills up
        gen = rngmod.generator(33)
        gates = random_circuit_gates(layout, gen)
        dec = pauli_decompose(evolve_operator(layout, gates=gates), n)
        outside = [q for q in range(n) if q not in cone]
        codes = np.arange(4**n)
        for q in outside:
            digit = (codes >> (2 * (n - 1 - q))) & 3
            mass = np.abs(dec.coefficients[digit != 0])
            assert mass.max(initial=0.0) < 1e-10


class TestAvgOperatorSize:
    def test_depth_zero_is_exactly_one(self):
        stats = avg_operator_size("brickwall-open", 6, 0, samples=3, seed=1)
        assert stats.mean == pytest.approx(1.0)
        assert stats.std_err == pytest.approx(0.0)

    def test_growth_with_depth(self):
        prev = None
        for depth in (0, 1, 3, 6):
            stats = avg_operator_size("brickwall-open", 6, depth, samples=40, seed=2)
            if prev is not None:
                assert stats.mean >= prev.mean - 2 * (stats.std_err + prev.std_err)
            prev = stats

    def test_nonlocal_architectures_scramble_at_least_as_fast(self):
        base = avg_operator_size("brickwall-open", 6, 2, samples=60, seed=3)
        for arch in ("prism", "polygon"):
            other = avg_operator_size(arch, 6, 2, samples=60, seed=3)
            assert other.mean >= base.mean - 2 * (other.std_err + base.std_err)
