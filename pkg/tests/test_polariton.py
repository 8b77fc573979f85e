import dataclasses
import math

import numpy as np
import pytest

from photonmott import (
    LatticeSpec,
    PhysicalParams,
    build_full,
    dark_fock_vector,
    derive,
    nonlinear_shift_oracle,
    polariton_set,
    spectrum_check,
)
from photonmott.polariton import vacuum_vector


def single_cavity_basis(params, cap=1):
    return build_full(dataclasses.replace(params, g24=0.0, epsilon=0.0),
                      LatticeSpec(L=1, J=0.0), cap).basis


def random_params(rng) -> PhysicalParams:
    return PhysicalParams(
        Omega=10 ** rng.uniform(10.5, 13),
        g13=10 ** rng.uniform(8, 10),
        g24=0.0,
        delta=rng.choice([-1.0, 1.0]) * 10 ** rng.uniform(9, 12),
        Delta=-1.25e9, epsilon=0.0,
        N=int(rng.integers(1, 10000)),
        Gamma_C=0.0, Gamma_4=0.0)


class TestPolaritonSet:
    def test_one_excitation_states_orthonormal(self):
        rng = np.random.default_rng(23)
        for _ in range(100):
            p = random_params(rng)
            basis = single_cavity_basis(p)
            pset = polariton_set(p, basis)
            vac = vacuum_vector(basis)
            vecs = [op.matrix @ vac for op in
                    (pset.p0_raise, pset.p_plus_raise, pset.p_minus_raise)]
            gram = np.array([[np.vdot(a, b) for b in vecs] for a in vecs])
            np.testing.assert_allclose(gram, np.eye(3), atol=1e-10)

    def test_dark_polariton_is_photon_like_at_large_drive(self):
        g13, N = 2.5e9, 1000
        g = math.sqrt(N) * g13
        p = PhysicalParams(Omega=100 * g, g13=g13, g24=0.0, delta=1e11,
                           Delta=-1e9, epsilon=0.0, N=N, Gamma_C=0.0, Gamma_4=0.0)
        basis = single_cavity_basis(p)
        pset = polariton_set(p, basis)
        vac = vacuum_vector(basis)
        photon = np.zeros(basis.dim, dtype=complex)
        occ = [0] * basis.n_modes
        occ[basis.mode_index("a[0]")] = 1
        photon[basis.index_of(occ)] = 1.0
        overlap = abs(np.vdot(photon, pset.p0_raise.matrix @ vac))
        assert overlap >= 0.9999

    def test_balanced_coupling_symmetry(self):
        # g = Omega: p0^dag|vac> = (|b2> - |photon>)/sqrt(2)
        p = PhysicalParams(Omega=5e10, g13=5e10, g24=0.0, delta=0.0,
                           Delta=-1e9, epsilon=0.0, N=1, Gamma_C=0.0, Gamma_4=0.0)
        basis = single_cavity_basis(p)
        pset = polariton_set(p, basis)
        vec = pset.p0_raise.matrix @ vacuum_vector(basis)
        occ_a = [0] * basis.n_modes
        occ_a[basis.mode_index("a[0]")] = 1
        occ_b2 = [0] * basis.n_modes
        occ_b2[basis.mode_index("b2[0]")] = 1
        assert vec[basis.index_of(occ_b2)] == pytest.approx(1 / math.sqrt(2))
        assert vec[basis.index_of(occ_a)] == pytest.approx(-1 / math.sqrt(2))

    def test_dark_state_never_occupies_level3(self):
        rng = np.random.default_rng(29)
        for _ in range(50):
            p = random_params(rng)
            basis = single_cavity_basis(p)
            pset = polariton_set(p, basis)
            vec = pset.p0_raise.matrix @ vacuum_vector(basis)
            occ_b3 = [0] * basis.n_modes
            occ_b3[basis.mode_index("b3[0]")] = 1
            assert vec[basis.index_of(occ_b3)] == 0.0


class TestSpectrumCheck:
    def test_fig2_residuals(self, fig2_params):
        p = dataclasses.replace(fig2_params, g24=0.0, epsilon=0.0)
        model = build_full(p, LatticeSpec(L=1, J=0.0), cap=1)
        report = spectrum_check(p, model)
        d = derive(p)
        assert report.max_residual < 1e-9 * abs(d.mu_plus)

    def test_degenerate_delta_zero(self):
        p = PhysicalParams(Omega=1e12, g13=2.5e9, g24=0.0, delta=0.0,
                           Delta=-1e9, epsilon=0.0, N=1000,
                           Gamma_C=0.0, Gamma_4=0.0)
        model = build_full(p, LatticeSpec(L=1, J=0.0), cap=1)
        report = spectrum_check(p, model)
        d = derive(p)
        assert d.mu_plus == pytest.approx(d.B, rel=1e-14)
        assert d.mu_minus == pytest.approx(-d.B, rel=1e-14)
        assert report.max_residual < 1e-10 * d.B

    def test_random_draws_relative_residual(self):
        rng = np.random.default_rng(31)
        for _ in range(100):
            p = random_params(rng)
            model = build_full(p, LatticeSpec(L=1, J=0.0), cap=1)
            report = spectrum_check(p, model)
            scale = max(abs(f) for f in report.frequencies[1:])
            assert report.max_residual < 1e-8 * scale


class TestNonlinearShiftOracle:
    def test_fig2_matches_2U_within_ten_percent(self, fig2_params):
        shift = nonlinear_shift_oracle(fig2_params, cap=2)
        assert shift == pytest.approx(2 * derive(fig2_params).U, rel=0.10)

    def test_tightened_regime_within_five_percent(self, fig2_params):
        p = dataclasses.replace(fig2_params, Delta=-2.5e9)  # ratio 0.05
        shift = nonlinear_shift_oracle(p, cap=2)
        assert shift == pytest.approx(2 * derive(p).U, rel=0.05)

    def test_error_improves_monotonically(self, fig2_params):
        d = derive(fig2_params)
        errors = []
        for ratio in (0.1, 0.075, 0.05):
            delta4 = -fig2_params.g24 * d.g / (ratio * fig2_params.Omega)
            p = dataclasses.replace(fig2_params, Delta=delta4)
            shift = nonlinear_shift_oracle(p, cap=2)
            two_u = 2 * derive(p).U
            errors.append(abs(shift - two_u) / abs(two_u))
        assert errors[0] > errors[1] > errors[2]

    def test_no_coupling_no_shift(self, fig2_params):
        p = dataclasses.replace(fig2_params, g24=0.0)
        shift = nonlinear_shift_oracle(p, cap=2)
        assert abs(shift) < 1e-6 * abs(derive(p).mu_plus)

    def test_shift_changes_sign_with_Delta(self, fig2_params):
        plus = nonlinear_shift_oracle(
            dataclasses.replace(fig2_params, Delta=+1.25e9), cap=2)
        minus = nonlinear_shift_oracle(fig2_params, cap=2)
        assert minus > 0 > plus
        assert plus == pytest.approx(-minus, rel=0.05)

    def test_cap_independence(self, fig2_params):
        shifts = [nonlinear_shift_oracle(fig2_params, cap=c) for c in (2, 3, 4)]
        ref = shifts[0]
        assert all(abs(s - ref) <= 0.01 * abs(ref) for s in shifts)

    def test_cap_below_two_rejected(self, fig2_params):
        with pytest.raises(ValueError, match="cap"):
            nonlinear_shift_oracle(fig2_params, cap=1)


class TestDarkFock:
    def test_normalization(self, fig2_params):
        basis = build_full(fig2_params, LatticeSpec(L=1, J=0.0), cap=3).basis
        for n in (1, 2, 3):
            vec = dark_fock_vector(fig2_params, basis, n)
            assert np.linalg.norm(vec) == pytest.approx(1.0)
