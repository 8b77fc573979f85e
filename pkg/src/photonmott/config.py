"""Run configuration: flat-key YAML schema, presets and the resolved echo.

One structured text file drives every command.  Keys are flat, units are SI
(angular frequencies in rad/s, times in seconds), floats may use scientific
notation.  The fully resolved configuration is echoed next to the outputs as
``run_config.echo`` in the same format and re-ingests to an identical run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Mapping, Optional

import yaml

from .dynamics import IntegratorConfig
from .parameters import DriveRamp, LatticeSpec, PhysicalParams


class ConfigError(ValueError):
    """Malformed, missing or unknown configuration content."""


_REQUIRED = ("Omega", "g13", "g24", "delta", "Delta", "epsilon", "N",
             "Gamma_C", "Gamma_4", "L", "J")

_OPTIONAL_DEFAULTS: Mapping[str, Any] = {
    "boundary": "periodic",
    "delta_C": None,
    "g13_scale": None,
    "g24_scale": None,
    "Omega_scale": None,
    "ramp_times": None,
    "ramp_omegas": None,
    "cap": 3,
    "duration": 1.0e-6,
    "samples": 1001,
    "solver": "both",
    "n_traj": 1,
    "loss_mode": "linear",
    "rel_tol": 1.0e-8,
    "abs_tol": 1.0e-10,
    "max_step": None,
    "method": "auto",
    "eig_segments": None,
    "seed": 0,
    "threads": 1,
    "out_dir": "out",
}

_SOLVERS = ("master", "trajectory", "both")


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved inputs for one scenario run."""

    physical: PhysicalParams
    lattice: LatticeSpec
    ramp: DriveRamp
    cap: int
    duration: float
    samples: int
    solver: str
    n_traj: int
    loss_mode: str
    rel_tol: float
    abs_tol: float
    max_step: Optional[float]
    method: str
    eig_segments: Optional[int]
    seed: int
    threads: int
    out_dir: str

    def __post_init__(self) -> None:
        if not self.duration > 0:
            raise ConfigError("duration must be > 0")
        if self.samples < 2:
            raise ConfigError("samples must be >= 2")
        if self.solver not in _SOLVERS:
            raise ConfigError(f"solver must be one of {_SOLVERS}, got {self.solver!r}")
        if self.solver in ("trajectory", "both") and self.n_traj < 1:
            raise ConfigError("n_traj must be >= 1 when trajectories are requested")
        if self.seed < 0:
            raise ConfigError("seed must be >= 0")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")

    def integrator_config(self, **overrides) -> IntegratorConfig:
        kwargs = dict(
            rel_tol=self.rel_tol, abs_tol=self.abs_tol, max_step=self.max_step,
            rng_seed=self.seed, method=self.method,
            eig_segments=self.eig_segments,
        )
        kwargs.update(overrides)
        return IntegratorConfig.for_span(self.duration, self.samples, **kwargs)

    def as_flat_dict(self) -> dict:
        p, lat = self.physical, self.lattice
        flat = {
            "Omega": p.Omega, "g13": p.g13, "g24": p.g24, "delta": p.delta,
            "Delta": p.Delta, "epsilon": p.epsilon, "N": p.N,
            "Gamma_C": p.Gamma_C, "Gamma_4": p.Gamma_4,
            "L": lat.L, "J": lat.J, "boundary": lat.boundary,
            "delta_C": list(lat.delta_C) if lat.delta_C else None,
            "g13_scale": list(lat.g13_scale) if lat.g13_scale else None,
            "g24_scale": list(lat.g24_scale) if lat.g24_scale else None,
            "Omega_scale": list(lat.Omega_scale) if lat.Omega_scale else None,
            "ramp_times": [t for t, _ in self.ramp.knots],
            "ramp_omegas": [om for _, om in self.ramp.knots],
            "cap": self.cap, "duration": self.duration, "samples": self.samples,
            "solver": self.solver, "n_traj": self.n_traj,
            "loss_mode": self.loss_mode,
            "rel_tol": self.rel_tol, "abs_tol": self.abs_tol,
            "max_step": self.max_step, "method": self.method,
            "eig_segments": self.eig_segments,
            "seed": self.seed, "threads": self.threads, "out_dir": self.out_dir,
        }
        return flat


def config_from_mapping(raw: Mapping[str, Any]) -> RunConfig:
    """Build a RunConfig from flat keys; unknown keys are rejected."""
    known = set(_REQUIRED) | set(_OPTIONAL_DEFAULTS)
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    missing = [k for k in _REQUIRED if k not in raw]
    if missing:
        raise ConfigError(f"missing required config keys: {missing}")
    values = dict(_OPTIONAL_DEFAULTS)
    values.update(raw)

    try:
        physical = PhysicalParams(
            Omega=float(values["Omega"]), g13=float(values["g13"]),
            g24=float(values["g24"]), delta=float(values["delta"]),
            Delta=float(values["Delta"]), epsilon=float(values["epsilon"]),
            N=int(values["N"]), Gamma_C=float(values["Gamma_C"]),
            Gamma_4=float(values["Gamma_4"]))
        lattice = LatticeSpec(
            L=int(values["L"]), J=float(values["J"]),
            boundary=str(values["boundary"]),
            delta_C=values["delta_C"], g13_scale=values["g13_scale"],
            g24_scale=values["g24_scale"], Omega_scale=values["Omega_scale"])
        if values["ramp_times"] is not None:
            omegas = values["ramp_omegas"]
            if omegas is None or len(omegas) != len(values["ramp_times"]):
                raise ConfigError("ramp_times and ramp_omegas must have equal length")
            ramp = DriveRamp(tuple(zip(values["ramp_times"], omegas)))
        else:
            ramp = DriveRamp.constant(physical.Omega)
        max_step = values["max_step"]
        eig_segments = values["eig_segments"]
        return RunConfig(
            physical=physical, lattice=lattice, ramp=ramp,
            cap=int(values["cap"]), duration=float(values["duration"]),
            samples=int(values["samples"]), solver=str(values["solver"]),
            n_traj=int(values["n_traj"]), loss_mode=str(values["loss_mode"]),
            rel_tol=float(values["rel_tol"]), abs_tol=float(values["abs_tol"]),
            max_step=None if max_step is None else float(max_step),
            method=str(values["method"]),
            eig_segments=None if eig_segments is None else int(eig_segments),
            seed=int(values["seed"]), threads=int(values["threads"]),
            out_dir=str(values["out_dir"]))
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path: str | Path) -> RunConfig:
    with open(path) as fh:
        raw = yaml.safe_load(fh)
    if not isinstance(raw, dict):
        raise ConfigError(f"config file {path} must hold a flat mapping")
    return config_from_mapping(raw)


def write_echo(config: RunConfig, path: str | Path) -> None:
    """Resolved-config echo; re-ingesting it reproduces the run exactly."""
    with open(path, "w") as fh:
        yaml.safe_dump(config.as_flat_dict(), fh, sort_keys=True,
                       default_flow_style=None)


def apply_overrides(config: RunConfig, overrides: Mapping[str, str]) -> RunConfig:
    """Apply 'key=value' strings on top of a resolved config."""
    if not overrides:
        return config
    flat = config.as_flat_dict()
    for key, text in overrides.items():
        if key not in flat:
            raise ConfigError(f"unknown config key in override: {key!r}")
        flat[key] = yaml.safe_load(text)
    return config_from_mapping(flat)


# --------------------------------------------------------------------------
# Presets
# --------------------------------------------------------------------------

_SQRT1000 = math.sqrt(1000.0)


def _mott_preset() -> dict:
    """Three toroidal micro-cavities, one photon each (the Mott scenario)."""
    return {
        "Omega": 20.0 * _SQRT1000 * 2.5e9,
        "g13": 2.5e9, "g24": 2.5e9,
        "delta": 1.0e11, "Delta": -1.25e9, "epsilon": 0.0,
        "N": 1000, "Gamma_C": 0.4e5, "Gamma_4": 1.6e7,
        "L": 3, "J": 1.2e6, "boundary": "periodic",
        "cap": 3, "duration": 1.0e-6, "samples": 1001,
        "solver": "both", "n_traj": 1, "loss_mode": "linear",
    }


def _transition_preset() -> dict:
    """Mott-to-superfluid ramp: Omega from 10 sqrt(N) g13 to 100 sqrt(N) g13."""
    g = _SQRT1000 * 2.5e9
    preset = _mott_preset()
    preset.update({
        "Omega": 10.0 * g,
        "Delta": -2.5e9, "J": 2.5e6,
        "duration": 2.0e-6, "samples": 2001,
        "ramp_times": [0.0, 2.0e-6],
        "ramp_omegas": [10.0 * g, 100.0 * g],
        "solver": "master",
        # 200 frozen-drive segments keep the 250-state model affordable while
        # the boundary scattering stays ~1e-3 in population
        "eig_segments": 200,
    })
    return preset


def _circuit_qed_preset() -> dict:
    """Single Cooper-pair-box 'atom' per stripline cavity (U/Gamma_C = 15).

    Only the figure of merit is anchored; the remaining numbers satisfy the
    validity regime (both coupling ratios at 0.1) around a Q ~ 1e6 cavity.
    """
    return {
        "Omega": 5.0e8, "g13": 5.0e7, "g24": 4.5e7,
        "delta": 1.0e9, "Delta": -4.5e7, "epsilon": 0.0,
        "N": 1, "Gamma_C": 3.0e4, "Gamma_4": 1.0e6,
        "L": 2, "J": 1.0e3, "boundary": "open",
        "cap": 2, "duration": 1.0e-5, "samples": 101,
        "solver": "master", "n_traj": 1, "loss_mode": "linear",
    }


PRESETS = {
    "mott": _mott_preset,
    "transition": _transition_preset,
    "circuit-qed": _circuit_qed_preset,
}


def preset_config(name: str) -> RunConfig:
    try:
        factory = PRESETS[name]
    except KeyError:
        raise ConfigError(f"unknown preset {name!r} (have: {sorted(PRESETS)})") from None
    return config_from_mapping(factory())
