"""Measured quantities: photon numbers, number fluctuations, survival.

Columns of a TimeSeries share one time grid and serialize to CSV with full
double precision (17 significant digits), so reruns are byte-stable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Mapping, Sequence, TextIO

import numpy as np

from .fockspace import QuantumState, SparseOperator, ZeroNormStateError, number_op
from .dynamics import EnsembleStats, MasterResult, TrajectoryRecord

VARIANCE_ROUNDOFF = 1e-12


class DisjointTimeGridError(ValueError):
    """Raised when two series cannot be compared on a common grid."""


@dataclass
class TimeSeries:
    """Named real-valued columns over one strictly increasing time grid."""

    times: np.ndarray
    columns: Dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.times = np.asarray(self.times, dtype=float)
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")
        for name, col in list(self.columns.items()):
            col = np.asarray(col, dtype=float)
            if col.shape != self.times.shape:
                raise ValueError(f"column {name!r} has shape {col.shape}, "
                                 f"expected {self.times.shape}")
            self.columns[name] = col

    def add(self, name: str, values) -> None:
        values = np.asarray(values, dtype=float)
        if values.shape != self.times.shape:
            raise ValueError(f"column {name!r} has shape {values.shape}, "
                             f"expected {self.times.shape}")
        self.columns[name] = values

    def to_csv(self, stream: TextIO) -> None:
        names = list(self.columns.keys())
        stream.write(",".join(["t"] + names) + "\n")
        cols = [self.times] + [self.columns[n] for n in names]
        for i in range(len(self.times)):
            stream.write(",".join(f"{c[i]:.17g}" for c in cols) + "\n")

    @classmethod
    def from_csv(cls, stream: TextIO) -> "TimeSeries":
        header = stream.readline().strip()
        names = header.split(",")
        if not names or names[0] != "t":
            raise ValueError(f"malformed CSV header: {header!r}")
        data = np.loadtxt(stream, delimiter=",", ndmin=2)
        if data.shape[1] != len(names):
            raise ValueError("CSV row width does not match header")
        return cls(times=data[:, 0],
                   columns={n: data[:, i] for i, n in enumerate(names) if i > 0})


def photon_number(state: QuantumState, cavity: int) -> float:
    """<a_l^dag a_l> on the (norm-divided) state."""
    basis = state.basis
    mode = basis.mode_index(f"a[{cavity}]")
    op = number_op(basis, mode)
    return float(_expect_real(state, op))


def photon_fluctuation(state: QuantumState, cavity: int) -> float:
    """F_l = sqrt(<n_l^2> - <n_l>^2), clipped at zero for tiny round-off."""
    basis = state.basis
    mode = basis.mode_index(f"a[{cavity}]")
    n = number_op(basis, mode)
    n2 = SparseOperator(basis, n.matrix @ n.matrix, hermitian_hint=True)
    mean = _expect_real(state, n)
    var = _expect_real(state, n2) - mean * mean
    if var < 0.0:
        scale = max(mean * mean, 1.0)
        if var < -VARIANCE_ROUNDOFF * scale:
            raise ValueError(f"variance {var} is negative beyond round-off")
        var = 0.0
    return float(np.sqrt(var))


def _expect_real(state: QuantumState, op: SparseOperator) -> float:
    from .fockspace import expectation

    return expectation(state, op).real


def survival_probability(record: TrajectoryRecord) -> np.ndarray:
    """The trajectory's cumulative squared-norm column."""
    return np.asarray(record.survival)


def ensemble_loss_probability(stats: EnsembleStats) -> float:
    """1 - mean survival at the final sample time."""
    return 1.0 - float(stats.means["survival"][-1])


def series_from_record(model_cavities: int, record: TrajectoryRecord) -> TimeSeries:
    """n_l, F_l and survival columns of a single trajectory."""
    ts = TimeSeries(times=record.times)
    for l in range(model_cavities):
        ts.add(f"n{l + 1}",
               [photon_number(s, l) for s in record.sample_states])
        ts.add(f"F{l + 1}",
               [photon_fluctuation(s, l) for s in record.sample_states])
    ts.add("survival", record.survival)
    return ts


def series_from_ensemble(stats: EnsembleStats, with_stderr: bool = False) -> TimeSeries:
    """CSV-facing columns of an ensemble (raw second moments stay internal)."""
    ts = TimeSeries(times=stats.times)
    for name, col in stats.means.items():
        if name.endswith("_sq"):
            continue
        ts.add(name, col)
    if with_stderr:
        for name, col in stats.stderrs.items():
            if name.endswith("_sq"):
                continue
            ts.add(f"{name}_se", col)
    return ts


def series_from_master(model_cavities: int, result: MasterResult) -> TimeSeries:
    """n_l, F_l and survival columns of a master-equation solution.

    Every collapse channel strictly lowers the weighted excitation number, so
    the master-equation analog of the trajectory survival is the population
    remaining in the initial excitation sector.
    """
    ts = TimeSeries(times=result.times)
    for l in range(model_cavities):
        ts.add(f"n{l + 1}", [photon_number(s, l) for s in result.states])
        ts.add(f"F{l + 1}", [photon_fluctuation(s, l) for s in result.states])
    basis = result.states[0].basis
    weights = basis.total_weight()
    rho0 = result.states[0].to_density_matrix().payload
    n0 = int(round(float(np.real(np.diag(rho0) @ weights)) /
                   max(float(np.trace(rho0).real), 1e-300)))
    sector = (weights == n0).astype(float)
    survival = []
    for s in result.states:
        rho = s.payload
        tr = float(np.trace(rho).real)
        survival.append(float(np.real(np.diag(rho) @ sector)) / tr)
    ts.add("survival", survival)
    return ts


def compare_models(full: TimeSeries, effective: TimeSeries,
                   columns: Sequence[str] | None = None) -> TimeSeries:
    """Deviation columns d<name> = full - effective on the full grid.

    Series on different grids are resampled by linear interpolation onto the
    overlap; disjoint time ranges raise DisjointTimeGridError.
    """
    if columns is None:
        columns = [c for c in full.columns if c in effective.columns
                   and not c.endswith("_se")]
    t_lo = max(full.times[0], effective.times[0])
    t_hi = min(full.times[-1], effective.times[-1])
    if t_hi <= t_lo:
        raise DisjointTimeGridError(
            f"time ranges do not overlap: [{full.times[0]}, {full.times[-1]}] "
            f"vs [{effective.times[0]}, {effective.times[-1]}]")
    mask = (full.times >= t_lo) & (full.times <= t_hi)
    grid = full.times[mask]
    out = TimeSeries(times=grid)
    for name in columns:
        a = full.columns[name][mask]
        b = np.interp(grid, effective.times, effective.columns[name])
        out.add(f"d{name}", a - b)
    return out


def deviation_maxima(dev: TimeSeries) -> Dict[str, float]:
    """max |column| per deviation column."""
    return {name: float(np.max(np.abs(col))) for name, col in dev.columns.items()}
