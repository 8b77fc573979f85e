"""Polariton transformation and the exact-diagonalization nonlinearity oracle.

The dark polariton p0 and the two bright branches p± diagonalize the
single-cavity one-excitation problem at g24 = epsilon = 0 with frequencies
(0, (delta+A)/2, (delta-A)/2).  The oracle below never uses the perturbative
U formula: it diagonalizes the one- and two-excitation sectors of the full
single-cavity Hamiltonian and reads off the anharmonicity of the dressed
dark branch, which is the independent check of the effective repulsion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from .fockspace import FockBasis, SparseOperator
from .models import ModelInstance, build_full
from .parameters import LatticeSpec, PhysicalParams, derive

OVERLAP_THRESHOLD = 0.5


class DarkBranchError(RuntimeError):
    """Raised when no eigenstate overlaps the dark-polariton target by >= 0.5."""


@dataclass(frozen=True)
class PolaritonSet:
    """Creation operators and frequencies of the three polariton species."""

    p0_raise: SparseOperator
    p_plus_raise: SparseOperator
    p_minus_raise: SparseOperator
    frequencies: tuple[float, float, float]  # (mu_0, mu_plus, mu_minus)


@dataclass(frozen=True)
class SpectrumReport:
    """Eigen-relation residuals ||H p_x^dag|vac> - mu_x p_x^dag|vac>||."""

    residuals: dict
    frequencies: tuple[float, float, float]

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values())


def _single_cavity_raisers(basis: FockBasis):
    from .fockspace import ladder

    a = ladder(basis, basis.mode_index("a[0]"), "raise")
    b2 = ladder(basis, basis.mode_index("b2[0]"), "raise")
    b3 = ladder(basis, basis.mode_index("b3[0]"), "raise")
    return a, b2, b3


def polariton_set(params: PhysicalParams, basis: FockBasis) -> PolaritonSet:
    """Polariton creation operators on a single-cavity basis.

    p0^dag   = (g b2^dag - Omega a^dag) / B
    p±^dag   = sqrt(2/(A(A±delta))) (Omega b2^dag + g a^dag ± (A±delta)/2 b3^dag)
    """
    d = derive(params)
    a, b2, b3 = _single_cavity_raisers(basis)
    g, om, delta = d.g, params.Omega, params.delta

    p0 = (g / d.B) * b2 + (-om / d.B) * a
    c_plus = math.sqrt(2.0 / (d.A * (d.A + delta)))
    c_minus = math.sqrt(2.0 / (d.A * (d.A - delta)))
    p_plus = c_plus * (om * b2 + g * a + ((d.A + delta) / 2.0) * b3)
    p_minus = c_minus * (om * b2 + g * a + (-(d.A - delta) / 2.0) * b3)
    return PolaritonSet(p0, p_plus, p_minus, (0.0, d.mu_plus, d.mu_minus))


def vacuum_vector(basis: FockBasis) -> np.ndarray:
    vec = np.zeros(basis.dim, dtype=np.complex128)
    vec[basis.index_of([0] * basis.n_modes)] = 1.0
    return vec


def dark_fock_vector(params: PhysicalParams, basis: FockBasis, n: int) -> np.ndarray:
    """Normalized n-quanta dark-polariton state (p0^dag)^n |vac> / sqrt(n!)."""
    pset = polariton_set(params, basis)
    vec = vacuum_vector(basis)
    for _ in range(n):
        vec = pset.p0_raise.matrix @ vec
    nrm = np.linalg.norm(vec)
    if nrm == 0.0:
        raise ValueError(f"(p0^dag)^{n}|vac> is outside the basis (cap too small)")
    return vec / nrm


def spectrum_check(params: PhysicalParams, model: ModelInstance) -> SpectrumReport:
    """Verify H p_x^dag|vac> = mu_x p_x^dag|vac> on a g24=eps=0 single cavity.

    Residuals are absolute 2-norms in rad/s.
    """
    basis = model.basis
    pset = polariton_set(params, basis)
    H = model.hamiltonian_at()
    vac = vacuum_vector(basis)
    residuals = {}
    for name, op, mu in (
        ("p0", pset.p0_raise, pset.frequencies[0]),
        ("p_plus", pset.p_plus_raise, pset.frequencies[1]),
        ("p_minus", pset.p_minus_raise, pset.frequencies[2]),
    ):
        v = op.matrix @ vac
        residuals[name] = float(np.linalg.norm(H @ v - mu * v))
    return SpectrumReport(residuals, pset.frequencies)


def _sector_eig(H: np.ndarray, weights: np.ndarray, n: int):
    idx = np.flatnonzero(weights == n)
    block = H[np.ix_(idx, idx)]
    evals, evecs = sla.eigh(block)
    return idx, evals, evecs


def nonlinear_shift_oracle(params: PhysicalParams, cap: int = 2) -> float:
    """Anharmonic shift E2 - 2 E1 of the dressed dark branch.

    Exactly diagonalizes the one- and two-excitation sectors of the full
    single-cavity Hamiltonian and identifies the dressed dark states by
    maximal overlap with (p0^dag)^n |vac>.  The returned shift equals 2U in
    the repulsive-positive sign convention (positive for Delta < 0).
    """
    if cap < 2:
        raise ValueError("cap must be >= 2 to resolve the two-excitation sector")
    lattice = LatticeSpec(L=1, J=0.0)
    model = build_full(params, lattice, cap)
    basis = model.basis
    H = model.hamiltonian_at().toarray()
    weights = basis.total_weight()

    energies = {}
    for n in (1, 2):
        target = dark_fock_vector(params, basis, n)
        idx, evals, evecs = _sector_eig(H, weights, n)
        overlaps = np.abs(evecs.conj().T @ target[idx]) ** 2
        best = int(np.argmax(overlaps))
        if overlaps[best] < OVERLAP_THRESHOLD:
            raise DarkBranchError(
                f"dark branch not identifiable in the {n}-excitation sector: "
                f"max overlap {overlaps[best]:.3f} < {OVERLAP_THRESHOLD}")
        energies[n] = float(evals[best])
    return energies[2] - 2.0 * energies[1]
