"""Trajectory ensembles with reproducible counter-based substreams.

Trajectory k draws from the Philox stream keyed by (rng_seed, k), and the
per-trajectory observable rows are reduced in trajectory order, so an
ensemble is bit-identical for any thread count or completion order.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..fockspace import QuantumState
from ..models import ModelInstance
from ..parameters import DriveRamp
from .integrator import IntegratorConfig
from .trajectory import (
    EigPropagator,
    TrajectoryRecord,
    evolve_trajectory,
)


@dataclass
class EnsembleStats:
    """Per-observable trajectory means and standard errors on the grid."""

    times: np.ndarray
    n_traj: int
    streams: list  # (rng_seed, k) per trajectory
    means: dict    # column -> array over sample times
    stderrs: dict  # column -> array over sample times

    def columns(self) -> list:
        return list(self.means.keys())


def observable_row(model: ModelInstance, record: TrajectoryRecord) -> np.ndarray:
    """(T, 3L+1) array per trajectory: n_l, conditioned F_l, <n_l^2>, survival.

    F_l is the per-trajectory (normalized-state) fluctuation that single-jump
    plots show; the raw second moment n_l^2 is kept so ensemble fluctuations
    can also be formed from averaged moments, which is the object that
    converges to the master equation.
    """
    L = model.n_cavities
    diags = [model.basis.states[:, model.photon_mode(l)].astype(float)
             for l in range(L)]
    T = len(record.times)
    row = np.empty((T, 3 * L + 1))
    for t_i, state in enumerate(record.sample_states):
        p = np.abs(state.payload) ** 2
        p = p / p.sum()
        for l in range(L):
            n = float(diags[l] @ p)
            n2 = float((diags[l] ** 2) @ p)
            row[t_i, l] = n
            row[t_i, L + l] = np.sqrt(max(n2 - n * n, 0.0))
            row[t_i, 2 * L + l] = n2
    row[:, 3 * L] = record.survival
    return row


def ensemble_columns(model: ModelInstance) -> list:
    L = model.n_cavities
    return ([f"n{l + 1}" for l in range(L)]
            + [f"F{l + 1}" for l in range(L)]
            + [f"n{l + 1}_sq" for l in range(L)]
            + ["survival"])


def run_ensemble(model: ModelInstance, ramp: Optional[DriveRamp],
                 psi0: QuantumState, cfg: IntegratorConfig, n_traj: int,
                 n_threads: int = 1,
                 return_rows: bool = False):
    """Mean and standard error of n_l, F_l and survival over n_traj runs.

    ramp=None means a constant drive at the model's reference value.  With
    return_rows=True additionally returns the (n_traj, T, M) stack of
    per-trajectory observable rows (for resampled error estimates).
    """
    if n_traj < 1:
        raise ValueError("n_traj must be >= 1")
    if ramp is None:
        ramp = DriveRamp.constant(model.omega_ref)
    method = cfg.method
    if method == "auto":
        from ..fockspace import DENSE_THRESHOLD
        method = "eig" if model.basis.dim <= DENSE_THRESHOLD else "rk45"
    propagator = EigPropagator(model, ramp, cfg) if method == "eig" else None
    eff_cfg = cfg if cfg.method != "auto" else \
        IntegratorConfig(sample_times=cfg.sample_times, rel_tol=cfg.rel_tol,
                         abs_tol=cfg.abs_tol, max_step=cfg.max_step,
                         rng_seed=cfg.rng_seed, method=method,
                         eig_segments=cfg.eig_segments)

    rows: list = [None] * n_traj

    def job(k: int) -> None:
        try:
            record = evolve_trajectory(model, ramp, psi0, eff_cfg, stream=k,
                                       propagator=propagator)
        except Exception as exc:
            raise RuntimeError(f"trajectory {k} failed: {exc}") from exc
        rows[k] = observable_row(model, record)

    if n_threads > 1:
        with ThreadPoolExecutor(max_workers=n_threads) as pool:
            list(pool.map(job, range(n_traj)))
    else:
        for k in range(n_traj):
            job(k)

    stack = np.stack(rows)  # (n_traj, T, M) in trajectory order
    means = stack.mean(axis=0)
    if n_traj > 1:
        stderr = stack.std(axis=0, ddof=1) / np.sqrt(n_traj)
    else:
        stderr = np.zeros_like(means)

    cols = ensemble_columns(model)
    stats = EnsembleStats(
        times=np.asarray(cfg.sample_times),
        n_traj=n_traj,
        streams=[(cfg.rng_seed, k) for k in range(n_traj)],
        means={c: means[:, i] for i, c in enumerate(cols)},
        stderrs={c: stderr[:, i] for i, c in enumerate(cols)},
    )
    if return_rows:
        return stats, stack
    return stats
