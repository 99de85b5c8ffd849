"""Statevector kernels against independent dense oracles."""

import numpy as np
import pytest
from scipy import stats as scipy_stats

from vqcdisc import rng as rngmod
from vqcdisc.statevec import (
    StateVector,
    apply_single_qubit,
    apply_two_qubit,
    bipartite_entropy,
    embed_gate,
    haar_unitary,
    inner_product,
    outcome_distribution,
    page_average_entropy,
    rotation_gate,
    ry_gate,
    rz_gate,
)

from conftest import dense_gate_oracle, page_entropy_monte_carlo, random_state_oracle

S2 = 1.0 / np.sqrt(2.0)


class TestRotationGate:
    def test_zero_angles_identity(self):
        np.testing.assert_allclose(rotation_gate(0, 0, 0), np.eye(2), atol=1e-15)

    def test_pi_y_rotation(self):
        expected = np.array([[0, -1], [1, 0]], dtype=complex)
        np.testing.assert_allclose(rotation_gate(0, np.pi, 0), expected, atol=1e-15)

    def test_matches_matrix_exponential_product(self):
        # oracle: eigendecomposition-based expm of each factor
        from scipy.linalg import expm
        z = np.diag([1.0, -1.0]).astype(complex)
        y = np.array([[0, -1j], [1j, 0]])
        t = np.pi / 2
        oracle = expm(-1j * t * z / 2) @ expm(-1j * t * y / 2) @ expm(-1j * t * z / 2)
        np.testing.assert_allclose(rotation_gate(t, t, t), oracle, atol=1e-14)

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            rotation_gate(np.nan, 0, 0)
        with pytest.raises(ValueError):
            rotation_gate(0, np.inf, 0)


class TestApplySingleQubit:
    def test_identity_keeps_zero_state(self):
        out = apply_single_qubit(StateVector.zero(1), 0, np.eye(2))
        np.testing.assert_allclose(out.amplitudes, [1, 0], atol=1e-15)

    def test_pi_y_flips_qubit(self):
        out = apply_single_qubit(StateVector.zero(1), 0, rotation_gate(0, np.pi, 0))
        assert abs(abs(out.amplitudes[1]) - 1.0) < 1e-12

    def test_matches_dense_oracle(self, rng):
        n = 3
        state = StateVector(n, random_state_oracle(n, rng))
        gate = haar_unitary(2, rng)
        out = apply_single_qubit(state, 1, gate)
        oracle = dense_gate_oracle(n, (1,), gate) @ state.amplitudes
        np.testing.assert_allclose(out.amplitudes, oracle, atol=1e-12)
        assert out.norm_error() < 1e-12

    def test_bad_index(self):
        with pytest.raises(ValueError):
            apply_single_qubit(StateVector.zero(2), 2, np.eye(2))

    def test_non_unitary_rejected(self):
        with pytest.raises(ValueError):
            apply_single_qubit(StateVector.zero(1), 0, np.array([[1, 0], [0, 2.0]]))


CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)


class TestApplyTwoQubit:
    def test_cnot_on_00(self):
        out = apply_two_qubit(StateVector.zero(2), 0, 1, CNOT)
        np.testing.assert_allclose(out.amplitudes, [1, 0, 0, 0], atol=1e-15)

    def test_cnot_on_10(self):
        state = StateVector.from_amplitudes([0, 0, 1, 0])  # |10>
        out = apply_two_qubit(state, 0, 1, CNOT)
        np.testing.assert_allclose(out.amplitudes, [0, 0, 0, 1], atol=1e-15)  # |11>

    def test_matches_dense_oracle_reversed_qubits(self, rng):
        n = 4
        state = StateVector(n, random_state_oracle(n, rng))
        gate = haar_unitary(4, rng)
        out = apply_two_qubit(state, 3, 1, gate)
        oracle = dense_gate_oracle(n, (3, 1), gate) @ state.amplitudes
        np.testing.assert_allclose(out.amplitudes, oracle, atol=1e-12)
        assert out.norm_error() < 1e-12

    def test_equal_indices_rejected(self):
        with pytest.raises(ValueError):
            apply_two_qubit(StateVector.zero(2), 1, 1, CNOT)


class TestEmbedGate:
    @pytest.mark.parametrize("qubits", [(0,), (2,), (0, 1), (2, 0), (1, 3)])
    def test_matches_dense_oracle(self, qubits, rng):
        n = 4
        gate = haar_unitary(2 ** len(qubits), rng)
        np.testing.assert_allclose(embed_gate(n, qubits, gate),
                                   dense_gate_oracle(n, qubits, gate), atol=1e-12)


class TestHaarUnitary:
    def test_dim1_is_phase(self, rng):
        for _ in range(20):
            u = haar_unitary(1, rng)
            assert abs(abs(u[0, 0]) - 1.0) < 1e-12

    def test_unitary(self, rng):
        for dim in (2, 4, 8):
            u = haar_unitary(dim, rng)
            np.testing.assert_allclose(u.conj().T @ u, np.eye(dim), atol=1e-12)

    def test_first_moment_dim2(self):
        gen = rngmod.generator(101)
        vals = [abs(haar_unitary(2, gen)[0, 0]) ** 2 for _ in range(100_000)]
        assert abs(np.mean(vals) - 0.5) < 0.01

    def test_first_moment_dim4(self):
        gen = rngmod.generator(102)
        vals = [abs(haar_unitary(4, gen)[0, 0]) ** 2 for _ in range(10_000)]
        assert abs(np.mean(vals) - 0.25) < 0.02

    def test_overlap_distribution_ks(self):
        # P(|<0|U|0>|^2 = x) = (d-1)(1-x)^(d-2) for Haar U
        gen = rngmod.generator(103)
        n = 3
        d = 2**n
        samples = np.array([abs(haar_unitary(d, gen)[0, 0]) ** 2
                            for _ in range(10_000)])
        res = scipy_stats.kstest(samples, lambda x: 1 - (1 - x) ** (d - 1))
        assert res.pvalue > 0.01


class TestInnerProductAndOutcomes:
    def test_trivial_inner_products(self):
        zero = StateVector.from_amplitudes([1, 0])
        one = StateVector.from_amplitudes([0, 1])
        plus = StateVector.from_amplitudes([S2, S2])
        assert inner_product(zero, zero) == pytest.approx(1)
        assert inner_product(zero, one) == pytest.approx(0)
        assert inner_product(zero, plus) == pytest.approx(S2)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            inner_product(StateVector.zero(2), StateVector.zero(3))

    def test_outcome_distribution_basis_state(self):
        state = StateVector.from_amplitudes([0, 1, 0, 0])  # |01>
        np.testing.assert_allclose(outcome_distribution(state), [0, 1, 0, 0])

    def test_outcome_distribution_bell(self):
        bell = StateVector.from_amplitudes([S2, 0, 0, S2])
        np.testing.assert_allclose(outcome_distribution(bell), [0.5, 0, 0, 0.5])

    def test_outcome_distribution_sums_to_one(self, rng):
        state = StateVector(5, random_state_oracle(5, rng))
        assert abs(outcome_distribution(state).sum() - 1.0) < 1e-10


class TestBipartiteEntropy:
    def test_product_state_zero(self, rng):
        single = [random_state_oracle(1, rng) for _ in range(4)]
        amps = single[0]
        for s in single[1:]:
            amps = np.kron(amps, s)
        state = StateVector(4, amps)
        for cut in range(1, 4):
            assert bipartite_entropy(state, cut) < 1e-10

    def test_bell_pair_one_bit(self):
        bell = StateVector.from_amplitudes([S2, 0, 0, S2])
        assert bipartite_entropy(bell, 1) == pytest.approx(1.0, abs=1e-12)

    def test_bounds(self, rng):
        state = StateVector(5, random_state_oracle(5, rng))
        for cut in range(1, 5):
            s = bipartite_entropy(state, cut)
            assert -1e-12 <= s <= min(cut, 5 - cut) + 1e-12

    def test_cut_out_of_range(self):
        with pytest.raises(ValueError):
            bipartite_entropy(StateVector.zero(3), 3)

    def test_page_value_n6_half_cut(self):
        # independent oracle first: Monte Carlo over Haar states, then the
        # closed-form Page value; both must agree with the library's sampler
        oracle_rng = np.random.default_rng(7)
        mc = page_entropy_monte_carlo(6, 3, 500, oracle_rng)
        closed = page_average_entropy(8, 8)
        assert abs(mc - closed) < 0.05  # MC error ~ 0.01 bits at 500 samples
        gen = rngmod.generator(55)
        lib = np.mean([
            bipartite_entropy(
                StateVector(6, np.ascontiguousarray(haar_unitary(64, gen)[:, 0])), 3)
            for _ in range(500)
        ])
        assert abs(lib - closed) < 0.05

    def test_page_formula_two_qubits(self):
        # d_a = d_b = 2: known value 1/3 nats
        assert page_average_entropy(2, 2) == pytest.approx(1 / (3 * np.log(2)))


class TestNormPreservation:
    def test_long_random_circuit(self, rng):
        n = 5
        state = StateVector.zero(n)
        gen = rngmod.generator(9)
        for _ in range(400):
            qa, qb = gen.choice(n, size=2, replace=False)
            state = apply_two_qubit(state, int(qa), int(qb), haar_unitary(4, gen))
        assert state.norm_error() < 1e-10


class TestStateVectorInvariants:
    def test_norm_validation(self):
        with pytest.raises(ValueError):
            StateVector.from_amplitudes([1.0, 1.0])

    def test_length_validation(self):
        with pytest.raises(ValueError):
            StateVector.from_amplitudes([1.0, 0.0, 0.0])

    def test_bit_ordering_qubit0_most_significant(self):
        # exciting qubit 0 of |00> must populate index 2 (binary 10)
        out = apply_single_qubit(StateVector.zero(2), 0, rotation_gate(0, np.pi, 0))
        assert abs(out.amplitudes[2]) == pytest.approx(1.0, abs=1e-12)
