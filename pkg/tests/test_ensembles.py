"""State ensembles, TFIM diagonalization, and the binary cache format."""

import numpy as np
import pytest

from vqcdisc.ensembles import (
    EnsembleSpec,
    load_states,
    mean_overlap,
    sample_state,
    sample_states,
    save_states,
    tfim_ground,
    tfim_ground_energy_free_fermion,
    tfim_hamiltonian,
)
from vqcdisc.errors import CapacityError
from vqcdisc.statevec import StateVector, bipartite_entropy, page_average_entropy


class TestSpecValidation:
    def test_unknown_kind(self):
        with pytest.raises(ValueError, match="haar"):
            EnsembleSpec("uniform", 4)

    def test_circuit_kind_needs_depth(self):
        with pytest.raises(ValueError):
            EnsembleSpec("local-random", 4)

    def test_tfim_needs_finite_g(self):
        with pytest.raises(ValueError):
            EnsembleSpec("tfim-ground", 4, g=float("nan"))


class TestSampling:
    def test_states_are_normalized(self):
        for spec in (EnsembleSpec("haar", 5, seed=1),
                     EnsembleSpec("local-random", 5, d0=3, seed=1),
                     EnsembleSpec("ti-local-random", 6, d0=3, seed=1),
                     EnsembleSpec("tfim-ground", 4, g=1.0)):
            state = sample_state(spec, 0)
            assert state.norm_error() < 1e-10

    def test_same_seed_bit_identical(self):
        spec = EnsembleSpec("local-random", 5, d0=4, seed=9)
        a = sample_state(spec, 3)
        b = sample_state(spec, 3)
        assert np.array_equal(a.amplitudes, b.amplitudes)

    def test_distinct_indices_differ(self):
        spec = EnsembleSpec("haar", 4, seed=9)
        a, b = sample_states(spec, 2)
        assert abs(np.vdot(a.amplitudes, b.amplitudes)) < 0.999

    def test_ti_sample_invariant_under_two_site_shift(self):
        # shared gates within each periodic brick layer make the sampled
        # state exactly invariant under the two-site cyclic shift
        n = 6
        spec = EnsembleSpec("ti-local-random", n, d0=5, seed=3)
        state = sample_state(spec, 0)
        t = state.amplitudes.reshape([2] * n)
        shifted = np.moveaxis(t, [0, 1, 2, 3, 4, 5], [4, 5, 0, 1, 2, 3]).reshape(-1)
        np.testing.assert_allclose(shifted, state.amplitudes, atol=1e-12)

    def test_local_random_depth1_area_law(self):
        # at depth 1 the entropy across the leftmost cut comes from a single
        # two-qubit gate acting on |00>, bounded by 1 bit
        spec = EnsembleSpec("local-random", 6, d0=1, seed=11)
        for i in range(20):
            s = sample_state(spec, i)
            assert bipartite_entropy(s, 1) <= 1.0 + 1e-9

    def test_entropy_growth_and_page_saturation(self):
        # ensemble-mean half-cut entropy grows with preparation depth and
        # saturates at the Page value for d0 >= 2n
        n, samples = 6, 200
        page = page_average_entropy(8, 8)
        means = []
        errs = []
        for d0 in (1, 2, 4, 6, 12):
            spec = EnsembleSpec("local-random", n, d0=d0, seed=21)
            vals = np.array([bipartite_entropy(sample_state(spec, i), n // 2)
                             for i in range(samples)])
            means.append(vals.mean())
            errs.append(vals.std(ddof=1) / np.sqrt(samples))
        for k in range(len(means) - 1):
            assert means[k + 1] >= means[k] - 2 * (errs[k] + errs[k + 1])
        assert abs(means[-1] - page) / page < 0.05


class TestMeanOverlap:
    def test_haar_n6_matches_inverse_dimension(self):
        mean, err = mean_overlap(EnsembleSpec("haar", 6, seed=5), 10_000)
        assert abs(mean - 1 / 64) < 3 * err

    def test_local_random_one_design(self):
        mean, err = mean_overlap(EnsembleSpec("local-random", 6, d0=2, seed=6), 10_000)
        assert abs(mean - 1 / 64) < 3 * err

    def test_single_qubit_haar(self):
        mean, err = mean_overlap(EnsembleSpec("haar", 1, seed=7), 10_000)
        assert abs(mean - 0.5) < 3 * err


class TestTfimHamiltonian:
    def test_n2_g0_spectrum(self):
        evals = np.linalg.eigvalsh(tfim_hamiltonian(2, 0.0))
        np.testing.assert_allclose(evals, [-2, -2, 2, 2], atol=1e-12)

    def test_traceless(self):
        for n, g in ((3, 0.7), (4, 2.0), (5, -1.3)):
            assert abs(np.trace(tfim_hamiltonian(n, g))) < 1e-10

    def test_real_symmetric(self):
        h = tfim_hamiltonian(4, 1.7)
        assert np.allclose(h, h.T)
        assert np.isrealobj(h)

    @pytest.mark.parametrize("n", [2, 4, 6, 8])
    @pytest.mark.parametrize("g", [0.0, 0.5, 1.0, 2.0, 10.0])
    def test_ground_energy_matches_free_fermion_oracle(self, n, g):
        dense = float(np.linalg.eigvalsh(tfim_hamiltonian(n, g))[0])
        assert abs(dense - tfim_ground_energy_free_fermion(n, g)) < 1e-8


class TestTfimGround:
    def test_paramagnetic_limit(self):
        minus = np.array([1, -1]) / np.sqrt(2)
        target = minus
        for _ in range(5):
            target = np.kron(target, minus)
        ground = tfim_ground(6, 50.0).ground
        assert abs(np.vdot(ground.amplitudes, target)) ** 2 > 0.999

    def test_degenerate_limit_returns_ghz(self):
        slice_ = tfim_ground(6, 0.0)
        assert slice_.degenerate
        ghz = np.zeros(64)
        ghz[0] = ghz[-1] = 1 / np.sqrt(2)
        assert np.linalg.norm(slice_.ground.amplitudes - ghz) < 1e-6

    def test_gap_near_asymptotic_form(self):
        # finite-size gap at g=2 approaches 2(|g| - 1) = 2
        slice_ = tfim_ground(10, 2.0)
        assert abs((slice_.e1 - slice_.e0) - 2.0) / 2.0 < 0.15

    def test_ground_state_is_real_and_sign_fixed(self):
        for g in (0.3, 1.0, 4.0):
            ground = tfim_ground(6, g).ground
            assert np.max(np.abs(ground.amplitudes.imag)) < 1e-10
            first = ground.amplitudes[np.abs(ground.amplitudes) > 1e-12][0]
            assert first.real > 0

    def test_entropy_ordering_area_law(self):
        s_crit = bipartite_entropy(tfim_ground(6, 1.0).ground, 3)
        s_para = bipartite_entropy(tfim_ground(6, 10.0).ground, 3)
        assert s_para < s_crit

    def test_capacity_error(self):
        with pytest.raises(CapacityError):
            tfim_ground(13, 1.0)

    def test_e0_below_e1(self):
        for g in (0.2, 1.0, 3.0):
            slice_ = tfim_ground(4, g)
            assert slice_.e0 <= slice_.e1


class TestBinaryFormat:
    def test_roundtrip_bit_exact(self, tmp_path):
        spec = EnsembleSpec("local-random", 4, d0=2, seed=77)
        states = sample_states(spec, 3)
        path = tmp_path / "states.bin"
        save_states(path, spec, states)
        loaded_spec, loaded = load_states(path)
        assert loaded_spec == spec
        assert len(loaded) == 3
        for a, b in zip(states, loaded):
            assert np.array_equal(a.amplitudes, b.amplitudes)

    def test_rejects_wrong_magic(self, tmp_path):
        path = tmp_path / "bogus.bin"
        path.write_bytes(b"NOTASTATEFILE" + b"\0" * 64)
        with pytest.raises(ValueError):
            load_states(path)

    def test_rejects_mismatched_state(self, tmp_path):
        spec = EnsembleSpec("haar", 3, seed=1)
        with pytest.raises(ValueError):
            save_states(tmp_path / "x.bin", spec, [StateVector.zero(4)])
