import numpy as np
import pytest

import nhzm
from nhzm.errors import DegeneratePerturbationError
from nhzm.perturbation import PerturbationSetup


def setup_for(gamma, t_prime=0.2):
    spec = nhzm.coupled_chain(gamma, t_prime=t_prime)
    return spec, PerturbationSetup.from_spec(spec)


class TestSetup:
    def test_junction_structure(self):
        spec, setup = setup_for(2.0)
        assert setup.t_prime == 0.2
        nz = np.nonzero(setup.h_prime)
        assert sorted(zip(*nz)) == [(8, 9), (9, 8)]
        assert np.all(setup.h_prime[nz] == 1.0)
        # the cut Hamiltonian is block diagonal
        assert setup.h0.matrix[8, 9] == 0.0

    def test_block_modes_vanish_in_the_other_block(self):
        _, setup = setup_for(1.0)
        for i in range(19):
            psi = setup.modes.right_vectors[:, i]
            sys_weight = np.linalg.norm(psi[:9])
            res_weight = np.linalg.norm(psi[9:])
            assert min(sys_weight, res_weight) == 0.0

    def test_zero_mode_index_picks_the_edge_mode(self):
        _, setup = setup_for(2.0)
        idx = setup.zero_mode_index()
        assert abs(setup.modes.eigenvalues[idx]) < 1e-12
        psi = setup.modes.right_vectors[:, idx]
        assert np.linalg.norm(psi[9:]) == 0.0


class TestFirstOrderEnergy:
    @pytest.mark.parametrize("gamma", np.round(np.arange(0.25, 3.01, 0.25), 10))
    def test_vanishes_for_every_mode(self, gamma):
        _, setup = setup_for(float(gamma))
        for i in range(19):
            if setup.modes.near_defective[i]:
                continue
            assert abs(nhzm.first_order_energy(setup, i)) < 1e-12

    def test_zero_coupling_gives_zero(self):
        spec = nhzm.coupled_chain(1.0)
        setup = PerturbationSetup.from_spec(spec)
        scaled = PerturbationSetup(setup.h0, setup.h_prime, 0.0, setup.modes)
        assert nhzm.first_order_energy(scaled, 0) == 0.0

    def test_synthetic_diagonal_structure_shifts_energy(self):
        _, setup = setup_for(1.0)
        h_prime = np.zeros((19, 19))
        h_prime[4, 4] = 1.0
        synthetic = PerturbationSetup(setup.h0, h_prime, 0.3, setup.modes)
        idx = setup.zero_mode_index()
        psi = setup.modes.right_vectors[:, idx]
        phi = setup.modes.left_vectors[idx]
        expected = 0.3 * phi[4] * psi[4]
        assert nhzm.first_order_energy(synthetic, idx) == pytest.approx(expected)
        assert abs(expected) > 0

    def test_near_defective_mode_rejected(self):
        # the uncoupled reservoir passes an exceptional point near
        # gamma = 2 cos(pi/11), where perturbation theory must refuse
        gamma_ep = 2 * np.cos(np.pi / 11)
        _, setup = setup_for(gamma_ep)
        flagged = np.nonzero(setup.modes.near_defective)[0]
        assert flagged.size
        with pytest.raises(DegeneratePerturbationError):
            nhzm.first_order_energy(setup, int(flagged[0]))


class TestFirstOrderWavefunction:
    def test_zero_mode_correction_lives_in_the_reservoir(self):
        _, setup = setup_for(2.0)
        idx = setup.zero_mode_index()
        correction = nhzm.first_order_wavefunction(setup, idx)
        assert np.linalg.norm(correction[:9]) == 0.0
        assert np.linalg.norm(correction[9:]) > 0.0

    def test_zero_coupling_gives_zero_vector(self):
        _, setup = setup_for(1.0)
        scaled = PerturbationSetup(setup.h0, setup.h_prime, 0.0, setup.modes)
        correction = nhzm.first_order_wavefunction(scaled, scaled.zero_mode_index())
        assert np.linalg.norm(correction) == 0.0

    def test_corrected_profile_is_linear_at_critical_modulation(self):
        _, setup = setup_for(2.000316)
        idx = setup.zero_mode_index()
        psi = setup.modes.right_vectors[:, idx] + \
            nhzm.first_order_wavefunction(setup, idx)
        fit = nhzm.fit_tail(psi, range(9, 19), "linear", per_sublattice=False)
        assert fit.r_squared >= 0.999

    def test_degenerate_denominator_raises_cleanly(self):
        gamma_ep = 2 * np.cos(np.pi / 11)
        _, setup = setup_for(gamma_ep)
        idx = setup.zero_mode_index()
        with pytest.raises(DegeneratePerturbationError):
            nhzm.first_order_wavefunction(setup, idx)


class TestAgainstExact:
    @pytest.mark.parametrize("gamma", [0.5, 2.0])
    def test_weak_coupling_agreement(self, gamma):
        spec = nhzm.coupled_chain(gamma, t_prime=0.2)
        comparison = nhzm.perturbation_vs_exact(spec)
        assert comparison.vector_error <= 0.05
        assert comparison.energy_error <= 2 * 0.2 ** 2

    def test_strong_coupling_degrades(self):
        weak = nhzm.perturbation_vs_exact(nhzm.coupled_chain(2.0, t_prime=0.2))
        strong = nhzm.perturbation_vs_exact(nhzm.coupled_chain(2.0, t_prime=0.6))
        assert strong.vector_error > 3 * weak.vector_error

    def test_error_scales_quadratically(self):
        t_primes = np.array([0.05, 0.1, 0.2])
        errors = np.array([
            nhzm.perturbation_vs_exact(
                nhzm.coupled_chain(2.0, t_prime=tp)).vector_error
            for tp in t_primes])
        slope = np.polyfit(np.log(t_primes), np.log(errors), 1)[0]
        assert slope == pytest.approx(2.0, abs=0.2)

    def test_halving_coupling_quarters_the_error(self):
        err1 = nhzm.perturbation_vs_exact(
            nhzm.coupled_chain(2.0, t_prime=0.2)).vector_error
        err2 = nhzm.perturbation_vs_exact(
            nhzm.coupled_chain(2.0, t_prime=0.1)).vector_error
        assert 3.0 <= err1 / err2 <= 5.5
