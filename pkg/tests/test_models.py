import dataclasses

import numpy as np
import pytest
import scipy.linalg as sla

from photonmott import (
    LatticeSpec,
    build_bose_hubbard,
    build_full,
    derive,
    expectation,
    initial_state,
    number_op,
    weighted_number_op,
)
from photonmott.fockspace import BasisTooLargeError


def fig2_no4(fig2_params):
    return dataclasses.replace(fig2_params, g24=0.0)


class TestBuildFull:
    def test_three_cavity_dimension_and_pairs(self, fig2_params, fig2_lattice):
        model = build_full(fig2_params, fig2_lattice, cap=3)
        assert model.basis.dim == 250
        assert fig2_lattice.neighbor_pairs() == [(0, 1), (1, 2), (2, 0)]
        assert len(model.collapse_ops) == 6  # (a_l, Gamma_C) and (b4_l, Gamma_4)

    def test_one_excitation_spectrum_matches_polariton_frequencies(self, fig2_params):
        p = fig2_no4(fig2_params)
        model = build_full(p, LatticeSpec(L=1, J=0.0), cap=1)
        H = model.hamiltonian_at().toarray()
        sector = np.flatnonzero(model.basis.total_weight() == 1)
        evals = np.sort(sla.eigvalsh(H[np.ix_(sector, sector)]))
        d = derive(p)
        expected = np.sort([0.0, d.mu_plus, d.mu_minus])
        np.testing.assert_allclose(evals, expected, rtol=1e-8, atol=1e-3)
        # frozen independent values evaluated from the Fig. 2 inputs
        np.testing.assert_allclose(
            evals, [-1.5339034e12, 0.0, 1.6339034e12], rtol=1e-6, atol=1.0)

    def test_hermiticity(self, fig2_params, fig2_lattice):
        model = build_full(fig2_params, fig2_lattice, cap=3)
        assert model.h_static.hermiticity_defect() < 1e-12
        assert model.h_drive.hermiticity_defect() < 1e-12

    def test_excitation_conservation(self, fig2_params, fig2_lattice):
        model = build_full(fig2_params, fig2_lattice, cap=3)
        n_w = weighted_number_op(model.basis).matrix
        h = model.hamiltonian_at()
        comm = (h @ n_w - n_w @ h)
        defect = np.abs(comm.toarray()).max()
        assert defect < 1e-9 * np.abs(h.toarray()).max()

    def test_two_cavity_open_boundary(self, fig2_params):
        lat = LatticeSpec(L=2, J=1.2e6, boundary="open")
        model = build_full(fig2_params, lat, cap=2)
        assert lat.neighbor_pairs() == [(0, 1)]
        # hopping appears: <1 photon in 0| H |1 photon in 1> = J
        basis = model.basis
        occ0 = [0] * basis.n_modes
        occ1 = list(occ0)
        occ0[model.photon_mode(0)] = 1
        occ1[model.photon_mode(1)] = 1
        h = model.hamiltonian_at()
        assert h[basis.index_of(occ0), basis.index_of(occ1)] == pytest.approx(1.2e6)

    def test_dark_state_has_no_level3_weight(self, fig2_params):
        p = fig2_no4(fig2_params)
        model = build_full(p, LatticeSpec(L=1, J=0.0), cap=1)
        H = model.hamiltonian_at().toarray()
        sector = np.flatnonzero(model.basis.total_weight() == 1)
        evals, evecs = sla.eigh(H[np.ix_(sector, sector)])
        zero_branch = evecs[:, np.argmin(np.abs(evals))]
        b3_slot = [i for i, k in enumerate(sector)
                   if model.basis.occupation(k)[model.basis.mode_index("b3[0]")] == 1]
        assert np.abs(zero_branch[b3_slot]).max() < 1e-10

    def test_legacy_regime_oracle_agreement(self, fig2_params):
        # |Delta| = 100 g24 is deep in the legacy perturbative regime
        from photonmott import nonlinear_shift_oracle

        p = dataclasses.replace(fig2_params, Delta=-100.0 * fig2_params.g24)
        shift = nonlinear_shift_oracle(p, cap=2)
        assert shift == pytest.approx(2.0 * derive(p).U, rel=0.05)

    def test_per_cavity_overrides_enter_hamiltonian(self, fig2_params):
        lat = LatticeSpec(L=2, J=0.0, boundary="open",
                          delta_C=[0.0, 5.0e8], g24_scale=[1.0, 0.5])
        model = build_full(fig2_params, lat, cap=2)
        basis = model.basis
        occ = [0] * basis.n_modes
        occ[model.photon_mode(1)] = 1
        k = basis.index_of(occ)
        assert model.h_static.matrix[k, k] == pytest.approx(5.0e8)

    def test_drive_split(self, fig2_params):
        # the Omega term must live in h_drive, everything else in h_static
        model = build_full(fig2_params, LatticeSpec(L=1, J=0.0), cap=2)
        basis = model.basis
        occ_b3 = [0] * basis.n_modes
        occ_b3[basis.mode_index("b3[0]")] = 1
        occ_b2 = [0] * basis.n_modes
        occ_b2[basis.mode_index("b2[0]")] = 1
        i, j = basis.index_of(occ_b2), basis.index_of(occ_b3)
        assert model.h_drive.matrix[i, j] == pytest.approx(fig2_params.Omega)
        assert model.h_static.matrix[i, j] == 0.0
        assert model.drive_power == 1
        assert model.omega_ref == fig2_params.Omega


class TestBuildBoseHubbard:
    def test_dimension(self, fig2_lattice):
        model = build_bose_hubbard(1.25e7, 0.0, fig2_lattice, cap=3,
                                   gamma_linear=4e4)
        assert model.basis.dim == 20

    def test_onsite_energy_on_double_occupation(self, fig2_lattice):
        U = 1.25e7
        model = build_bose_hubbard(U, 0.0, fig2_lattice, cap=3, gamma_linear=0.0)
        state = initial_state(model, [2, 0, 0])
        h = model.hamiltonian_at()
        val = np.vdot(state.payload, h @ state.payload).real
        assert val == pytest.approx(2 * U)  # n(n-1) U with n = 2

    def test_kappa_total_shift(self, fig2_lattice):
        kappa = 3.3e5
        model = build_bose_hubbard(0.0, kappa, fig2_lattice, cap=3,
                                   gamma_linear=0.0)
        lat0 = dataclasses.replace(fig2_lattice, J=0.0)
        model = build_bose_hubbard(0.0, kappa, lat0, cap=3, gamma_linear=0.0)
        state = initial_state(model, [1, 1, 1])
        val = np.vdot(state.payload, model.hamiltonian_at() @ state.payload).real
        assert val == pytest.approx(3 * kappa)

    def test_mott_gap_at_zero_hopping(self, fig2_lattice):
        U = 1.25e7
        lat0 = dataclasses.replace(fig2_lattice, J=0.0)
        model = build_bose_hubbard(U, 0.0, lat0, cap=3, gamma_linear=0.0)
        H = model.hamiltonian_at().toarray()
        sector = np.flatnonzero(model.basis.total_weight() == 3)
        evals = np.sort(sla.eigvalsh(H[np.ix_(sector, sector)]))
        assert evals[0] == pytest.approx(0.0, abs=1e-3)  # |1,1,1>
        assert evals[1] == pytest.approx(2 * U, rel=1e-12)  # one doublon

    def test_pair_loss_channel(self, fig2_lattice):
        gamma_pair = 1.6e5
        model = build_bose_hubbard(1.25e7, 0.0, fig2_lattice, cap=3,
                                   loss_mode="linear_plus_pair",
                                   gamma_linear=4e4, gamma_pair=gamma_pair)
        assert len(model.collapse_ops) == 6
        # a doubly occupied cavity decays through a^2 at exactly gamma_pair
        pair_ops = model.collapse_ops[1::2]
        state = initial_state(model, [2, 0, 0])
        op, rate = pair_ops[0]
        l_psi = op.matrix @ state.payload
        assert rate * np.vdot(l_psi, l_psi).real == pytest.approx(gamma_pair)

    def test_loss_mode_validation(self, fig2_lattice):
        with pytest.raises(ValueError, match="loss_mode"):
            build_bose_hubbard(1.0, 0.0, fig2_lattice, cap=2, loss_mode="bogus")

    def test_drive_power_inverse_square(self, fig2_lattice):
        model = build_bose_hubbard(1.25e7, 0.0, fig2_lattice, cap=3,
                                   gamma_linear=0.0, omega_ref=2.0e12)
        assert model.drive_power == -2
        assert model.drive_coefficient(4.0e12) == pytest.approx(0.25)


class TestInitialState:
    def test_unit_filling(self, fig2_params, fig2_lattice):
        model = build_full(fig2_params, fig2_lattice, cap=3)
        state = initial_state(model, [1, 1, 1])
        assert state.norm() == pytest.approx(1.0)
        for l in range(3):
            assert expectation(state, number_op(model.basis, model.photon_mode(l))) \
                == pytest.approx(1.0)

    def test_vacuum(self, fig2_params, fig2_lattice):
        model = build_full(fig2_params, fig2_lattice, cap=3)
        state = initial_state(model, [0, 0, 0])
        nw = weighted_number_op(model.basis)
        assert expectation(state, nw) == pytest.approx(0.0)

    def test_cap_violation_raises_then_succeeds_with_larger_cap(self, fig2_lattice):
        model3 = build_bose_hubbard(1.0, 0.0, fig2_lattice, cap=3, gamma_linear=0.0)
        with pytest.raises(ValueError, match="cap"):
            initial_state(model3, [3, 1, 0])
        model4 = build_bose_hubbard(1.0, 0.0, fig2_lattice, cap=4, gamma_linear=0.0)
        state = initial_state(model4, [3, 1, 0])
        assert state.norm() == pytest.approx(1.0)

    def test_wrong_length(self, fig2_params, fig2_lattice):
        model = build_full(fig2_params, fig2_lattice, cap=3)
        with pytest.raises(ValueError, match="photon numbers"):
            initial_state(model, [1, 1])


class TestSafetyBound:
    def test_basis_guard_propagates(self, fig2_params):
        lat = LatticeSpec(L=3, J=1.0e6)
        with pytest.raises(BasisTooLargeError):
            build_full(fig2_params, lat, cap=3, safety_bound=100)
