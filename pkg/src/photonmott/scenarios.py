"""Scenario orchestration behind the CLI commands.

Each command resolves a RunConfig, runs the requested solvers, and writes a
deterministic artifact set next to `run_config.echo`:

* timeseries.csv -- all observable columns on one grid (17 significant digits)
* summary.json   -- derived parameters, validity report and run metrics
* deviations.csv -- full-vs-effective deviations (`compare`)

Reruns with identical config and seeds are byte-identical.
"""

from __future__ import annotations

import json
import math
from dataclasses import replace
from pathlib import Path
from typing import Mapping, Optional, Sequence

import numpy as np

from .config import RunConfig, write_echo
from .dynamics import evolve_master, run_ensemble
from .models import ModelInstance, build_bose_hubbard, build_full, initial_state
from .observables import (
    TimeSeries,
    compare_models,
    deviation_maxima,
    series_from_ensemble,
    series_from_master,
)
from .parameters import (
    DriveRamp,
    PhysicalParams,
    check_validity,
    derive,
    figure_of_merit,
    gain_vs_legacy,
)
from .polariton import nonlinear_shift_oracle, spectrum_check


def _json_dump(payload: dict, path: Path) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, allow_nan=True)
        fh.write("\n")


def derived_summary(physical: PhysicalParams) -> dict:
    d = derive(physical)
    out = d.as_dict()
    try:
        out["U_over_Gamma"] = figure_of_merit(physical)
    except ZeroDivisionError:
        out["U_over_Gamma"] = None  # lossless runs have no figure of merit
    out["gain_vs_legacy"] = gain_vs_legacy(physical) if physical.g24 > 0 else None
    return out


def run_params(config: RunConfig) -> dict:
    """Derived quantities, validity report and figures of merit (JSON)."""
    summary = {
        "derived": derived_summary(config.physical),
        "validity": check_validity(config.physical, config.lattice).as_dict(),
        "U_over_Gamma_with_pair_loss": figure_of_merit(
            config.physical, gamma_convention="with_pair_loss"),
    }
    return summary


def run_validate(config: RunConfig) -> dict:
    """Oracle-vs-formula report: polariton spectrum and anharmonic shift."""
    p = config.physical
    d = derive(p)
    # spectrum check runs on the g24 = epsilon = 0 single cavity
    p_spec = replace(p, g24=0.0, epsilon=0.0)
    from .parameters import LatticeSpec

    single = LatticeSpec(L=1, J=0.0)
    model = build_full(p_spec, single, cap=min(config.cap, 2))
    spec_report = spectrum_check(p_spec, model)
    shift = nonlinear_shift_oracle(p, cap=max(config.cap, 2))
    two_u = 2.0 * d.U
    return {
        "spectrum": {
            "residuals": spec_report.residuals,
            "max_residual": spec_report.max_residual,
            "relative_to_mu_plus": spec_report.max_residual / abs(d.mu_plus),
            "frequencies": {"mu_zero": 0.0, "mu_plus": d.mu_plus,
                            "mu_minus": d.mu_minus},
        },
        "oracle": {
            "anharmonic_shift": shift,
            "two_U_formula": two_u,
            "relative_deviation": abs(shift - two_u) / abs(two_u) if two_u else None,
        },
        "validity": check_validity(p, config.lattice).as_dict(),
    }


# --------------------------------------------------------------------------
# time-domain scenarios
# --------------------------------------------------------------------------

def _full_max_step(config: RunConfig) -> Optional[float]:
    """Spec default for the microscopic model: 1/(50 max|mu±|)."""
    if config.max_step is not None:
        return config.max_step
    d = derive(config.physical)
    return 1.0 / (50.0 * max(abs(d.mu_plus), abs(d.mu_minus)))


def _merge(target: TimeSeries, source: TimeSeries, prefix: str) -> None:
    for name, col in source.columns.items():
        target.add(f"{prefix}{name}", col)


def _u_of_t(physical: PhysicalParams, ramp: DriveRamp, times: np.ndarray) -> np.ndarray:
    g_sq = physical.N * physical.g13 * physical.g13
    om = np.array([ramp.at(t) for t in times])
    return -physical.g24 ** 2 * g_sq / (physical.Delta * om ** 2)


def run_timeseries_scenario(config: RunConfig, scenario: str,
                            out_dir: Optional[str] = None) -> dict:
    """Shared implementation of the `mott` and `transition` commands."""
    out = Path(out_dir or config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_echo(config, out / "run_config.echo")

    p, lat, ramp = config.physical, config.lattice, config.ramp
    d = derive(p)
    photons = [1] * lat.L

    full = build_full(p, lat, config.cap)
    bh = build_bose_hubbard(
        U=d.U, kappa=d.kappa, lattice=lat, cap=config.cap,
        loss_mode=config.loss_mode, gamma_linear=d.Gamma_linear,
        gamma_pair=d.Gamma_pair_coeff, omega_ref=ramp.at(0.0))

    ts = TimeSeries(times=np.linspace(0.0, config.duration, config.samples))
    summary: dict = {
        "scenario": scenario,
        "derived": derived_summary(p),
        "validity": check_validity(p, lat).as_dict(),
        "dimensions": {"full": full.basis.dim, "bose_hubbard": bh.basis.dim},
        "solver": config.solver,
        "n_traj": config.n_traj,
        "loss_probability": {},
    }

    # full microscopic model: quantum-jump trajectories
    cfg_full = config.integrator_config(max_step=_full_max_step(config))
    full_stats = run_ensemble(full, ramp, initial_state(full, photons),
                              cfg_full, config.n_traj, config.threads)
    full_series = series_from_ensemble(full_stats, with_stderr=True)
    _merge(ts, full_series, "full_")
    summary["loss_probability"]["full"] = \
        1.0 - float(full_stats.means["survival"][-1])

    # effective model: master equation and/or trajectories
    cfg_bh = config.integrator_config()
    bh_ref: Optional[TimeSeries] = None
    if config.solver in ("master", "both"):
        master = evolve_master(bh, ramp, initial_state(bh, photons), cfg_bh)
        bh_master_series = series_from_master(lat.L, master)
        _merge(ts, bh_master_series, "bh_master_")
        summary["loss_probability"]["bh_master"] = \
            1.0 - float(bh_master_series.columns["survival"][-1])
        summary["trace_drift_max"] = float(master.trace_drift.max())
        bh_ref = bh_master_series
    if config.solver in ("trajectory", "both"):
        bh_stats = run_ensemble(bh, ramp, initial_state(bh, photons),
                                cfg_bh, config.n_traj, config.threads)
        bh_traj_series = series_from_ensemble(bh_stats, with_stderr=True)
        _merge(ts, bh_traj_series, "bh_traj_")
        summary["loss_probability"]["bh_traj"] = \
            1.0 - float(bh_stats.means["survival"][-1])
        if bh_ref is None:
            bh_ref = bh_traj_series

    # deviations: ensemble-mean full minus the effective reference stream
    dev_cols = [f"n{l + 1}" for l in range(lat.L)] + \
        [f"F{l + 1}" for l in range(lat.L)]
    deviations = compare_models(full_series, bh_ref, columns=dev_cols)
    _merge(ts, deviations, "")
    summary["deviations_max"] = deviation_maxima(deviations)

    # scenario columns: on-site potential, hopping, drive
    u_t = _u_of_t(p, ramp, ts.times)
    ts.add("U", u_t)
    ts.add("J", np.full_like(ts.times, lat.J))
    ts.add("Omega", np.array([ramp.at(t) for t in ts.times]))
    summary["U_initial"] = float(u_t[0])
    summary["U_final"] = float(u_t[-1])
    summary["U_ratio_initial_over_final"] = float(u_t[0] / u_t[-1])
    if scenario == "transition":
        crossing = _crossing_time(ts.times, u_t, lat.J)
        summary["U_equals_J_crossing_time"] = crossing

    with open(out / "timeseries.csv", "w") as fh:
        ts.to_csv(fh)
    _json_dump(summary, out / "summary.json")
    summary["files"] = {
        "timeseries": str(out / "timeseries.csv"),
        "summary": str(out / "summary.json"),
        "echo": str(out / "run_config.echo"),
    }
    return summary


def _crossing_time(times: np.ndarray, u_t: np.ndarray, J: float) -> Optional[float]:
    sign = np.sign(np.abs(u_t) - J)
    flips = np.flatnonzero(np.diff(sign) != 0)
    if len(flips) == 0:
        return None
    i = int(flips[0])
    x0, x1 = np.abs(u_t[i]) - J, np.abs(u_t[i + 1]) - J
    frac = x0 / (x0 - x1) if x0 != x1 else 0.0
    return float(times[i] + frac * (times[i + 1] - times[i]))


def run_mott(config: RunConfig, out_dir: Optional[str] = None) -> dict:
    return run_timeseries_scenario(config, "mott", out_dir)


def run_transition(config: RunConfig, out_dir: Optional[str] = None) -> dict:
    return run_timeseries_scenario(config, "transition", out_dir)


# --------------------------------------------------------------------------
# parameter scans
# --------------------------------------------------------------------------

_SCANNABLE = ("Omega", "g13", "g24", "delta", "Delta", "epsilon",
              "Gamma_C", "Gamma_4", "J")


def parse_sweep(spec: str) -> tuple[str, np.ndarray]:
    """Parse 'name=lo:hi:n[:log]' into grid values."""
    try:
        name, rest = spec.split("=", 1)
        parts = rest.split(":")
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
        scale = parts[3] if len(parts) > 3 else "lin"
    except (ValueError, IndexError):
        raise ValueError(f"malformed sweep spec {spec!r}; "
                         "expected name=lo:hi:n[:log]") from None
    name = name.strip()
    if name not in _SCANNABLE:
        raise ValueError(f"cannot sweep unknown parameter {name!r} "
                         f"(sweepable: {_SCANNABLE})")
    if n < 1:
        raise ValueError("sweep needs at least one point")
    if n == 1:
        return name, np.array([lo])
    if scale == "log":
        return name, np.geomspace(lo, hi, n)
    if scale != "lin":
        raise ValueError(f"unknown sweep scale {scale!r}")
    return name, np.linspace(lo, hi, n)


def run_scan(config: RunConfig, sweeps: Sequence[str],
             disorder: Optional[Mapping[str, float]] = None,
             out_dir: Optional[str] = None) -> dict:
    """Tabulate U, Gamma, U/Gamma and validity over a 1- or 2-parameter grid.

    Disorder, when given as e.g. {"g24_scale": 0.5}, draws per-cavity scale
    factors uniformly in [1-w, 1+w] from the config seed and adds the min/max
    per-cavity U to each row.
    """
    if not 1 <= len(sweeps) <= 2:
        raise ValueError("scan needs one or two sweep specs")
    axes = [parse_sweep(s) for s in sweeps]
    out = Path(out_dir or config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_echo(config, out / "run_config.echo")

    rng = np.random.default_rng(config.seed)
    disorder = dict(disorder or {})
    for key in disorder:
        if key not in ("g13_scale", "g24_scale", "Omega_scale"):
            raise ValueError(f"unknown disorder knob {key!r}")

    grids = [axes[0][1]] if len(axes) == 1 else \
        [g.ravel() for g in np.meshgrid(axes[0][1], axes[1][1], indexing="ij")]
    names = [a[0] for a in axes]

    header = names + ["U", "kappa", "gamma_linear", "gamma_pair_coeff",
                      "U_over_Gamma", "gain_vs_legacy", "validity_pass"]
    if disorder:
        header += ["U_min", "U_max"]
    rows = []
    for i in range(len(grids[0])):
        point = {name: float(grid[i]) for name, grid in zip(names, grids)}
        physical, lattice = config.physical, config.lattice
        for name, value in point.items():
            if name == "J":
                lattice = replace(lattice, J=value)
            else:
                physical = replace(physical, **{name: value})
        d = derive(physical)
        fom = figure_of_merit(physical)
        gain = gain_vs_legacy(physical) if physical.g24 > 0 else math.nan
        report = check_validity(physical, lattice)
        row = [point[n] for n in names] + [
            d.U, d.kappa, d.Gamma_linear, d.Gamma_pair_coeff, fom, gain,
            1.0 if report.overall_pass else 0.0]
        if disorder:
            u_site = np.full(lattice.L, d.U)
            for key, width in disorder.items():
                scales = rng.uniform(1.0 - width, 1.0 + width, size=lattice.L)
                if key == "g24_scale":
                    u_site = u_site * scales ** 2
                elif key == "g13_scale":
                    u_site = u_site * scales ** 2
                else:  # Omega_scale
                    u_site = u_site / scales ** 2
            row += [float(u_site.min()), float(u_site.max())]
        rows.append(row)

    path = out / "scan.csv"
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")
    return {"rows": len(rows), "columns": header, "file": str(path)}


# --------------------------------------------------------------------------
# cross-run comparison
# --------------------------------------------------------------------------

def run_compare(left_csv: str, right_csv: str,
                left_prefix: str = "full_", right_prefix: str = "bh_master_",
                out_dir: Optional[str] = None) -> dict:
    """Deviation columns between two (possibly identical) timeseries files."""
    with open(left_csv) as fh:
        left = TimeSeries.from_csv(fh)
    with open(right_csv) as fh:
        right = TimeSeries.from_csv(fh)

    def strip(ts: TimeSeries, prefix: str) -> TimeSeries:
        cols = {name[len(prefix):]: col for name, col in ts.columns.items()
                if name.startswith(prefix) and not name.endswith("_se")}
        if not cols:
            raise ValueError(f"no columns with prefix {prefix!r}")
        return TimeSeries(times=ts.times, columns=cols)

    dev = compare_models(strip(left, left_prefix), strip(right, right_prefix))
    maxima = deviation_maxima(dev)
    result = {"deviations_max": maxima}
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        path = out / "deviations.csv"
        with open(path, "w") as fh:
            dev.to_csv(fh)
        result["file"] = str(path)
    return result
