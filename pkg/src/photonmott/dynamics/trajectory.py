"""Monte-Carlo wavefunction (quantum-jump) trajectories.

Between jumps the state evolves under the non-Hermitian drift
H_eff(t) = H(t) - (i/2) sum_k gamma_k L_k^dag L_k; a uniform draw r triggers
a jump when the squared norm falls to r, the jump channel is drawn with
probability proportional to gamma_k ||L_k psi||^2, and the state is
renormalized.  The squared norm is monotone non-increasing along the drift
(its derivative is -<sum gamma L^dag L> <= 0), so crossings are bracketed by
sample checks and localized by bisection.

Two interchangeable engines integrate the drift:

* 'rk45'  -- the adaptive Dormand-Prince stepper (any model, any ramp);
* 'eig'   -- exact piecewise-constant propagation via eigendecomposition of
  H_eff, exact for constant drives and frozen at sample-interval midpoints
  under a ramp.  This is what makes microsecond windows of the 250-state
  microscopic model affordable.

Trajectory k of a run is a pure function of (rng_seed, k): each trajectory
draws from a counter-based Philox stream keyed by that pair, so results are
independent of thread count and execution order.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from ..fockspace import DENSE_THRESHOLD, QuantumState
from ..models import ModelInstance
from ..parameters import DriveRamp
from .integrator import Dopri5, IntegrationError, IntegratorConfig

_BISECT_SHIFT = 10  # localization to max_step / 2**10
# cache all eig segments only while the tables stay below ~200 MB
_EIG_CACHE_BYTES = 200_000_000


class JumpDegeneracyError(RuntimeError):
    """A jump triggered but every channel has zero weight."""


@dataclass
class TrajectoryRecord:
    """One quantum-jump trajectory sampled on the configured grid.

    sample_states are normalized; survival is the cumulative squared norm of
    the never-renormalized wavefunction (jump renormalizations are folded
    back in, so the column is continuous and non-increasing).
    """

    times: np.ndarray
    sample_states: list
    jumps: list  # (time, channel index)
    survival: np.ndarray
    stream: tuple  # (rng_seed, trajectory index)


def trajectory_rng(seed: int, stream: int) -> np.random.Generator:
    """Counter-based Philox stream: trajectory `stream` of run `seed`."""
    key = np.array([np.uint64(seed), np.uint64(stream)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def gershgorin_bound(matrix: sp.spmatrix) -> float:
    """Upper bound on the spectral radius (max absolute row sum)."""
    m = abs(sp.csr_matrix(matrix))
    if m.nnz == 0:
        return 0.0
    return float(np.asarray(m.sum(axis=1)).max())


def default_max_step(model: ModelInstance, ramp: DriveRamp) -> float:
    """1/(50 * spectral bound of the drift), covering the whole ramp."""
    c_max = max(abs(model.drive_coefficient(om)) for _, om in ramp.knots)
    bound = (gershgorin_bound(model.h_static.matrix)
             + c_max * gershgorin_bound(model.h_drive.matrix)
             + 0.5 * gershgorin_bound(_dissipator_sum(model)))
    if bound == 0.0:
        return np.inf
    return 1.0 / (50.0 * bound)


def _dissipator_sum(model: ModelInstance) -> sp.csr_matrix:
    """sum_k gamma_k L_k^dag L_k."""
    dim = model.basis.dim
    G = sp.csr_matrix((dim, dim), dtype=np.complex128)
    for op, rate in model.collapse_ops:
        if rate > 0.0:
            G = G + rate * (op.matrix.getH() @ op.matrix)
    return G


def _check_pure_normalized(psi0: QuantumState) -> np.ndarray:
    if not psi0.is_pure:
        raise ValueError("trajectory evolution needs a pure initial state")
    vec = np.array(psi0.payload, dtype=np.complex128)
    nrm = np.linalg.norm(vec)
    if abs(nrm - 1.0) > 1e-6:
        raise ValueError(f"initial state must be normalized, got |psi| = {nrm}")
    return vec / nrm


class _JumpSampler:
    """Draws jump thresholds and channels from one trajectory stream."""

    def __init__(self, model: ModelInstance, rng: np.random.Generator):
        self.rng = rng
        self.channels = [(op.matrix, rate) for op, rate in model.collapse_ops]
        self.threshold = rng.random()

    def apply_jump(self, psi: np.ndarray) -> tuple[np.ndarray, int]:
        weights = np.array([rate * np.vdot(L @ psi, L @ psi).real
                            for L, rate in self.channels])
        total = weights.sum()
        if total <= 0.0:
            raise JumpDegeneracyError(
                "jump triggered but all channel weights vanish")
        u = self.rng.random() * total
        k = int(np.searchsorted(np.cumsum(weights), u, side="right"))
        k = min(k, len(weights) - 1)
        L, _ = self.channels[k]
        new = L @ psi
        new = new / np.linalg.norm(new)
        self.threshold = self.rng.random()
        return new, k


# --------------------------------------------------------------------------
# rk45 engine
# --------------------------------------------------------------------------

def _rk5_once(f, t: float, y: np.ndarray, h: float) -> np.ndarray:
    """Single unadapted 5th-order step (used by jump bisection)."""
    from .integrator import _A, _C

    k = [f(t, y)]
    for i in range(1, 7):
        yi = y + h * sum(a * ki for a, ki in zip(_A[i], k) if a != 0.0)
        if i == 6:
            return yi
        k.append(f(t + _C[i] * h, yi))
    raise AssertionError("unreachable")


def _drift_rhs(model: ModelInstance, ramp: DriveRamp):
    """RHS of the non-Hermitian drift; constant ramps take the static path."""
    G = _dissipator_sum(model)
    drift_static = (-1j) * model.h_static.matrix - 0.5 * G
    drive = (-1j) * model.h_drive.matrix
    if ramp.is_constant:
        M = (drift_static + model.drive_coefficient(ramp.at(0.0)) * drive).tocsr()

        def rhs(t, y):
            return M @ y
        return rhs

    def rhs(t, y):
        c = model.drive_coefficient(ramp.at(t))
        return drift_static @ y + c * (drive @ y)
    return rhs


def _trajectory_rk45(model, ramp, psi, cfg: IntegratorConfig,
                     stream: int) -> TrajectoryRecord:
    rhs = _drift_rhs(model, ramp)
    max_step = cfg.max_step or default_max_step(model, ramp)
    bisect_tol = max_step / 2 ** _BISECT_SHIFT
    rng = trajectory_rng(cfg.rng_seed, stream)
    sampler = _JumpSampler(model, rng)

    times = np.asarray(cfg.sample_times)
    span = times[-1] - times[0]
    stepper = Dopri5(rhs, times[0], psi, cfg.rel_tol, cfg.abs_tol, max_step,
                     span=span)
    weight = 1.0
    jumps: list[tuple[float, int]] = []
    states = [QuantumState(model.basis, psi / np.linalg.norm(psi))]
    survival = [weight * float(np.vdot(stepper.y, stepper.y).real)]

    def norm2(v):
        return float(np.vdot(v, v).real)

    for t_target in times[1:]:
        while t_target - stepper.t > 32.0 * np.spacing(abs(t_target)):
            t_prev, y_prev = stepper.t, stepper.y
            stepper.step(t_target)
            if norm2(stepper.y) <= sampler.threshold:
                ta, ya = t_prev, y_prev
                tb, yb = stepper.t, stepper.y
                while tb - ta > bisect_tol:
                    tm = 0.5 * (ta + tb)
                    ym = _rk5_once(rhs, ta, ya, tm - ta)
                    if norm2(ym) <= sampler.threshold:
                        tb, yb = tm, ym
                    else:
                        ta, ya = tm, ym
                weight *= norm2(yb)
                new_psi, channel = sampler.apply_jump(yb)
                jumps.append((tb, channel))
                stepper = Dopri5(rhs, tb, new_psi, cfg.rel_tol, cfg.abs_tol,
                                 max_step, span=span)
        stepper.t = t_target
        nrm2 = norm2(stepper.y)
        survival.append(weight * nrm2)
        states.append(QuantumState(model.basis, stepper.y / np.sqrt(nrm2)))

    return TrajectoryRecord(times=times, sample_states=states, jumps=jumps,
                            survival=np.array(survival),
                            stream=(cfg.rng_seed, stream))


# --------------------------------------------------------------------------
# eig engine
# --------------------------------------------------------------------------

class _Segment:
    """Exact propagator for one frozen-drive interval of H_eff."""

    def __init__(self, heff: np.ndarray, t0: float, t1: float):
        self.t0 = t0
        self.t1 = t1
        self.lam, self.V = sla.eig(heff)
        self.Vinv = sla.inv(self.V)

    def enter(self, psi: np.ndarray) -> np.ndarray:
        """Eigen-coordinates of a state at some reference time."""
        return self.Vinv @ psi

    def state(self, coeff: np.ndarray, tau: float) -> np.ndarray:
        return self.V @ (np.exp(-1j * self.lam * tau) * coeff)


class EigPropagator:
    """Per-segment eigendecompositions of H_eff, shared across trajectories.

    A constant ramp yields a single exact segment; a ramped drive is frozen
    at the midpoint of each segment (the midpoint is exact for the linear
    phase integral of a linear ramp).  Segment tables are cached when they
    fit in memory, otherwise rebuilt on demand one at a time.
    """

    def __init__(self, model: ModelInstance, ramp: DriveRamp,
                 cfg: IntegratorConfig):
        self.model = model
        self.ramp = ramp
        dim = model.basis.dim
        self._h_static = model.h_static.matrix.toarray() \
            - 0.5j * _dissipator_sum(model).toarray()
        self._h_drive = model.h_drive.matrix.toarray()

        t_end = cfg.sample_times[-1]
        if ramp.is_constant:
            bounds = np.array([0.0, t_end])
        elif cfg.eig_segments is not None:
            bounds = np.linspace(0.0, t_end, cfg.eig_segments + 1)
        else:
            bounds = np.asarray(cfg.sample_times)
        self.bounds = bounds
        n_seg = len(bounds) - 1
        self._cache_all = n_seg * dim * dim * 16 * 2 <= _EIG_CACHE_BYTES
        self._segments: dict[int, _Segment] = {}

    def segment_index(self, t: float) -> int:
        i = bisect_right(self.bounds, t) - 1
        return min(max(i, 0), len(self.bounds) - 2)

    def segment(self, i: int) -> _Segment:
        seg = self._segments.get(i)
        if seg is None:
            t0, t1 = self.bounds[i], self.bounds[i + 1]
            om = self.ramp.at(0.5 * (t0 + t1))
            heff = self._h_static + self.model.drive_coefficient(om) * self._h_drive
            seg = _Segment(heff, t0, t1)
            if not self._cache_all:
                self._segments.clear()
            self._segments[i] = seg
        return seg


def _trajectory_eig(model, ramp, psi, cfg: IntegratorConfig, stream: int,
                    propagator: Optional[EigPropagator]) -> TrajectoryRecord:
    prop = propagator or EigPropagator(model, ramp, cfg)
    max_step = cfg.max_step or default_max_step(model, ramp)
    bisect_tol = max_step / 2 ** _BISECT_SHIFT
    rng = trajectory_rng(cfg.rng_seed, stream)
    sampler = _JumpSampler(model, rng)

    times = np.asarray(cfg.sample_times)
    weight = 1.0
    jumps: list[tuple[float, int]] = []
    states = [QuantumState(model.basis, psi.copy())]
    survival = [1.0]

    # current anchor: exact state at time t_ref inside segment i_seg
    t_ref = times[0]
    psi_ref = psi
    i_seg = prop.segment_index(t_ref)
    seg = prop.segment(i_seg)
    coeff = seg.enter(psi_ref)

    def norm2_at(t):
        v = seg.state(coeff, t - t_ref)
        return float(np.vdot(v, v).real), v

    for t_target in times[1:]:
        while True:
            # advance the anchor across segment boundaries up to t_target
            while t_target > seg.t1 and i_seg < len(prop.bounds) - 2:
                n2, v = norm2_at(seg.t1)
                if n2 <= sampler.threshold:
                    break
                t_ref, psi_ref = seg.t1, v
                i_seg += 1
                seg = prop.segment(i_seg)
                coeff = seg.enter(psi_ref)
            t_eval = min(t_target, seg.t1) if t_target > seg.t1 else t_target
            n2, v = norm2_at(t_eval)
            if n2 > sampler.threshold:
                break
            # crossing in (t_ref, t_eval]: the squared norm is monotone
            ta, tb = t_ref, t_eval
            while tb - ta > bisect_tol:
                tm = 0.5 * (ta + tb)
                if norm2_at(tm)[0] <= sampler.threshold:
                    tb = tm
                else:
                    ta = tm
            n2_j, psi_j = norm2_at(tb)
            weight *= n2_j
            new_psi, channel = sampler.apply_jump(psi_j)
            jumps.append((tb, channel))
            t_ref, psi_ref = tb, new_psi
            coeff = seg.enter(psi_ref)
        n2, v = norm2_at(t_target)
        survival.append(weight * n2)
        states.append(QuantumState(model.basis, v / np.sqrt(n2)))

    return TrajectoryRecord(times=times, sample_states=states, jumps=jumps,
                            survival=np.array(survival),
                            stream=(cfg.rng_seed, stream))


def evolve_trajectory(model: ModelInstance, ramp: Optional[DriveRamp],
                      psi0: QuantumState, cfg: IntegratorConfig,
                      stream: int = 0,
                      propagator: Optional[EigPropagator] = None) -> TrajectoryRecord:
    """One quantum-jump trajectory sampled at cfg.sample_times.

    ramp=None means a constant drive at the model's reference value.
    `stream` selects the trajectory's Philox substream; ensembles pass
    0..n_traj-1 and a shared EigPropagator.
    """
    if ramp is None:
        ramp = DriveRamp.constant(model.omega_ref)
    psi = _check_pure_normalized(psi0)
    method = cfg.method
    if method == "auto":
        method = "eig" if model.basis.dim <= DENSE_THRESHOLD else "rk45"
    if method == "eig":
        return _trajectory_eig(model, ramp, psi, cfg, stream, propagator)
    return _trajectory_rk45(model, ramp, psi, cfg, stream)
