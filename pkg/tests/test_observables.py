import dataclasses
import io

import numpy as np
import pytest
import scipy.linalg as sla

from photonmott import (
    DriveRamp,
    IntegratorConfig,
    LatticeSpec,
    ModeSpec,
    QuantumState,
    TimeSeries,
    build_basis,
    build_bose_hubbard,
    compare_models,
    deviation_maxima,
    evolve_trajectory,
    initial_state,
    photon_fluctuation,
    photon_number,
    survival_probability,
)
from photonmott.observables import DisjointTimeGridError


def two_cavity_basis(cap=2):
    modes = [ModeSpec("a[0]", 1, cap), ModeSpec("a[1]", 1, cap)]
    return build_basis(modes, cap)


class TestPhotonNumber:
    def test_unit_filling(self, fig2_lattice):
        model = build_bose_hubbard(1.0, 0.0, fig2_lattice, cap=3, gamma_linear=0.0)
        state = initial_state(model, [1, 1, 1])
        for l in range(3):
            assert photon_number(state, l) == pytest.approx(1.0)
            assert photon_fluctuation(state, l) == pytest.approx(0.0)

    def test_vacuum(self):
        basis = two_cavity_basis()
        state = QuantumState.from_occupation(basis, [0, 0])
        assert photon_number(state, 0) == 0.0

    def test_noon_superposition(self):
        # (|2,0> + |0,2>)/sqrt(2): n1 = 1 by symmetry, F1 = 1
        basis = two_cavity_basis()
        vec = np.zeros(basis.dim, dtype=complex)
        vec[basis.index_of([2, 0])] = 1 / np.sqrt(2)
        vec[basis.index_of([0, 2])] = 1 / np.sqrt(2)
        state = QuantumState(basis, vec)
        assert photon_number(state, 0) == pytest.approx(1.0)
        assert photon_fluctuation(state, 0) == pytest.approx(1.0)

    def test_superfluid_limit_fluctuation(self):
        # U -> 0+ ground state of 3 photons on a 3-site ring: per-site
        # statistics are binomial(3, 1/3), so F = sqrt(2/3).  (At exactly
        # U = 0 the ground state is degenerate, so the limit is taken from
        # a tiny positive U.)
        lat = LatticeSpec(L=3, J=1.0)
        model = build_bose_hubbard(1e-6, 0.0, lat, cap=3, gamma_linear=0.0)
        H = model.hamiltonian_at().toarray()
        sector = np.flatnonzero(model.basis.total_weight() == 3)
        evals, evecs = sla.eigh(H[np.ix_(sector, sector)])
        vec = np.zeros(model.basis.dim, dtype=complex)
        vec[sector] = evecs[:, 0]
        state = QuantumState(model.basis, vec)
        assert photon_fluctuation(state, 0) == pytest.approx(
            np.sqrt(2.0 / 3.0), abs=1e-4)
        assert photon_number(state, 0) == pytest.approx(1.0, abs=1e-9)

    def test_fluctuation_two_routes_agree(self):
        # moment route vs spectral-decomposition variance
        basis = two_cavity_basis(cap=3)
        rng = np.random.default_rng(19)
        diag = basis.states[:, 0].astype(float)
        for _ in range(20):
            v = rng.normal(size=basis.dim) + 1j * rng.normal(size=basis.dim)
            state = QuantumState(basis, v)
            p = np.abs(v) ** 2
            p /= p.sum()
            mean = diag @ p
            var_direct = ((diag - mean) ** 2) @ p
            f = photon_fluctuation(state, 0)
            assert f ** 2 == pytest.approx(var_direct, abs=1e-10)

    def test_total_number_bounded_by_cap(self):
        basis = two_cavity_basis(cap=2)
        rng = np.random.default_rng(21)
        for _ in range(20):
            v = rng.normal(size=basis.dim) + 1j * rng.normal(size=basis.dim)
            state = QuantumState(basis, v)
            total = photon_number(state, 0) + photon_number(state, 1)
            assert total <= basis.excitation_cap + 1e-12


class TestCompareModels:
    def test_identical_series_zero_deviation(self):
        times = np.linspace(0, 1e-6, 11)
        a = TimeSeries(times=times, columns={"n1": np.linspace(1, 0.9, 11)})
        dev = compare_models(a, a)
        assert deviation_maxima(dev)["dn1"] == 0.0

    def test_self_comparison_of_trajectory(self, fig2_lattice):
        model = build_bose_hubbard(1.25e7, 0.0, fig2_lattice, cap=3,
                                   gamma_linear=4e4, omega_ref=1.0)
        cfg = IntegratorConfig.for_span(2e-7, 11, rng_seed=0, method="eig")
        rec = evolve_trajectory(model, None, initial_state(model, [1, 1, 1]), cfg)
        from photonmott import series_from_record

        ts = series_from_record(3, rec)
        dev = compare_models(ts, ts)
        assert max(deviation_maxima(dev).values()) == 0.0

    def test_resampling_by_interpolation(self):
        coarse = TimeSeries(times=np.array([0.0, 1.0, 2.0]),
                            columns={"n1": np.array([0.0, 1.0, 2.0])})
        fine = TimeSeries(times=np.linspace(0, 2, 21),
                          columns={"n1": np.linspace(0, 2, 21)})
        dev = compare_models(fine, coarse)
        assert deviation_maxima(dev)["dn1"] < 1e-12

    def test_disjoint_ranges_raise(self):
        a = TimeSeries(times=np.array([0.0, 1.0]), columns={"n1": np.zeros(2)})
        b = TimeSeries(times=np.array([5.0, 6.0]), columns={"n1": np.zeros(2)})
        with pytest.raises(DisjointTimeGridError):
            compare_models(a, b)

    def test_partial_overlap_resamples(self):
        a = TimeSeries(times=np.linspace(0.0, 2.0, 21),
                       columns={"n1": np.linspace(0.0, 2.0, 21)})
        b = TimeSeries(times=np.linspace(1.0, 3.0, 21),
                       columns={"n1": np.linspace(1.0, 3.0, 21)})
        dev = compare_models(a, b)
        assert dev.times[0] >= 1.0
        assert deviation_maxima(dev)["dn1"] < 1e-12


class TestSurvival:
    def test_lossless_survival_is_one(self, fig2_lattice):
        model = build_bose_hubbard(1.25e7, 0.0, fig2_lattice, cap=3,
                                   gamma_linear=0.0, omega_ref=1.0)
        cfg = IntegratorConfig.for_span(2e-7, 11, rng_seed=1, method="eig")
        rec = evolve_trajectory(model, None, initial_state(model, [1, 1, 1]), cfg)
        np.testing.assert_allclose(survival_probability(rec), 1.0, atol=1e-10)

    def test_independent_decay_matches_exponential(self, fig2_lattice):
        # 3 non-interacting photons each decaying at gamma: over a window
        # with small gamma*t the ensemble-mean survival is exp(-3 gamma t)
        # (cumulative survival of jumpy trajectories is biased O((gamma t)^2))
        from photonmott import run_ensemble

        gamma = 4e4
        lat0 = dataclasses.replace(fig2_lattice, J=0.0)
        model = build_bose_hubbard(0.0, 0.0, lat0, cap=3,
                                   gamma_linear=gamma, omega_ref=1.0)
        cfg = IntegratorConfig.for_span(1.2e-6, 13, rng_seed=2, method="eig")
        stats = run_ensemble(model, None, initial_state(model, [1, 1, 1]), cfg,
                             n_traj=300)
        target = np.exp(-3 * gamma * stats.times)
        dev = np.abs(stats.means["survival"] - target)
        bound = 3 * np.maximum(stats.stderrs["survival"], 1e-12) + 0.005
        assert (dev <= bound).all()


class TestTimeSeriesCsv:
    def test_round_trip_full_precision(self):
        times = np.linspace(0.0, 1e-6, 7)
        cols = {"n1": np.array([1.0, 0.1 + 0.2, np.pi, 1e-300, 2 ** 0.5, 0.3, 7.0]),
                "F1": np.linspace(0, 1, 7)}
        ts = TimeSeries(times=times, columns=cols)
        buf = io.StringIO()
        ts.to_csv(buf)
        buf.seek(0)
        back = TimeSeries.from_csv(buf)
        np.testing.assert_array_equal(back.times, times)
        for name in cols:
            np.testing.assert_array_equal(back.columns[name], cols[name])

    def test_byte_stable(self):
        ts = TimeSeries(times=np.linspace(0, 1, 5),
                        columns={"x": np.sqrt(np.linspace(0, 2, 5))})
        a, b = io.StringIO(), io.StringIO()
        ts.to_csv(a)
        ts.to_csv(b)
        assert a.getvalue() == b.getvalue()

    def test_malformed_header(self):
        with pytest.raises(ValueError, match="header"):
            TimeSeries.from_csv(io.StringIO("time,n1\n0,1\n"))
