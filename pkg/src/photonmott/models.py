"""Model builders: the full microscopic cavity array and the effective model.

The full model bosonizes the collective atomic (Dicke) modes: each cavity l
carries four bosonic modes

    a[l]  photon            weight 1
    b2[l] level-2 collective weight 1
    b3[l] level-3 collective weight 1
    b4[l] level-4 collective weight 2

with couplings g = sqrt(N) g13 on a-b3, Omega on b2-b3 and the cubic
g24 (a^dag b2^dag b4 + h.c.) on the photon-assisted 2-4 transition.  This is
the leading order in excitations/N; with N = 1000 and at most 3 excitations
the neglected corrections are O(n/N).

The effective model keeps the photon modes only, with on-site repulsion U,
hopping J and chemical-potential shift kappa.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import scipy.sparse as sp

from .fockspace import (
    DEFAULT_SAFETY_BOUND,
    FockBasis,
    ModeSpec,
    QuantumState,
    SparseOperator,
    build_basis,
    ladder,
    number_op,
)
from .parameters import LatticeSpec, PhysicalParams

HERMITICITY_RTOL = 1e-12


@dataclass(frozen=True)
class ModelInstance:
    """A basis, a (possibly driven) Hamiltonian and its collapse channels.

    The Hamiltonian at drive value Omega(t) is

        H(t) = h_static + (Omega(t) / omega_ref)**drive_power * h_drive

    with drive_power +1 for the full model (the Omega b2^dag b3 term) and -2
    for the effective model (U and kappa both scale as Omega^-2).  Collapse
    rates are fixed at their omega_ref values.
    """

    label: str
    basis: FockBasis
    h_static: SparseOperator
    h_drive: SparseOperator
    drive_power: int
    omega_ref: float
    collapse_ops: tuple[tuple[SparseOperator, float], ...]
    n_cavities: int

    def __post_init__(self) -> None:
        for name in ("h_static", "h_drive"):
            defect = getattr(self, name).hermiticity_defect()
            if defect > HERMITICITY_RTOL:
                raise ValueError(f"{name} is not Hermitian (defect {defect:.2e})")
        if any(rate < 0 for _, rate in self.collapse_ops):
            raise ValueError("collapse rates must be >= 0")
        if not self.omega_ref > 0:
            raise ValueError("omega_ref must be > 0")

    def drive_coefficient(self, omega: float) -> float:
        return (omega / self.omega_ref) ** self.drive_power

    def hamiltonian_at(self, omega: Optional[float] = None) -> sp.csr_matrix:
        """H at drive value omega (omega_ref when omitted)."""
        if omega is None or omega == self.omega_ref:
            return (self.h_static.matrix + self.h_drive.matrix).tocsr()
        c = self.drive_coefficient(omega)
        return (self.h_static.matrix + c * self.h_drive.matrix).tocsr()

    def photon_mode(self, cavity: int) -> int:
        return self.basis.mode_index(f"a[{cavity}]")


def _cavity_modes(lattice: LatticeSpec, cap: int) -> list[ModeSpec]:
    modes = []
    for l in range(lattice.L):
        modes.append(ModeSpec(f"a[{l}]", weight=1, local_cutoff=cap))
        modes.append(ModeSpec(f"b2[{l}]", weight=1, local_cutoff=cap))
        modes.append(ModeSpec(f"b3[{l}]", weight=1, local_cutoff=cap))
        modes.append(ModeSpec(f"b4[{l}]", weight=2, local_cutoff=cap // 2))
    return modes


def build_full(params: PhysicalParams, lattice: LatticeSpec, cap: int,
               safety_bound: int = DEFAULT_SAFETY_BOUND) -> ModelInstance:
    """Full bosonized cavity-array model.

    Per cavity: eps n_b2 + delta n_b3 + (Delta+eps) n_b4
    + [Omega b2^dag b3 + g a^dag b3 + g24 a^dag b2^dag b4 + h.c.],
    photon hopping J between nearest neighbors, collapse channels
    (a_l, Gamma_C) and (b4_l, Gamma_4).  The Omega term sits in h_drive.
    """
    if cap < 1:
        raise ValueError("cap must be >= 1")
    basis = build_basis(_cavity_modes(lattice, cap), cap, safety_bound)

    low = {m.label: ladder(basis, i, "lower").matrix
           for i, m in enumerate(basis.modes)}

    h_static = sp.csr_matrix((basis.dim, basis.dim), dtype=np.complex128)
    h_drive = sp.csr_matrix((basis.dim, basis.dim), dtype=np.complex128)
    collapse: list[tuple[SparseOperator, float]] = []

    for l in range(lattice.L):
        a = low[f"a[{l}]"]
        b2 = low[f"b2[{l}]"]
        b3 = low[f"b3[{l}]"]
        b4 = low[f"b4[{l}]"]
        g_l = np.sqrt(params.N) * params.g13 * lattice.site_value("g13_scale", l)
        g24_l = params.g24 * lattice.site_value("g24_scale", l)
        omega_l = params.Omega * lattice.site_value("Omega_scale", l)
        delta_C_l = lattice.site_value("delta_C", l, default=0.0)

        h_static = h_static + (
            params.epsilon * (b2.getH() @ b2)
            + params.delta * (b3.getH() @ b3)
            + (params.Delta + params.epsilon) * (b4.getH() @ b4)
            + delta_C_l * (a.getH() @ a)
        )
        coup = g_l * (a.getH() @ b3) + g24_l * (a.getH() @ b2.getH() @ b4)
        h_static = h_static + coup + coup.getH()
        # the drive term scales linearly with Omega(t); per-site scale folds in
        drive = omega_l * (b2.getH() @ b3)
        h_drive = h_drive + drive + drive.getH()

        collapse.append((SparseOperator(basis, a), params.Gamma_C))
        collapse.append((SparseOperator(basis, b4), params.Gamma_4))

    hop = sp.csr_matrix((basis.dim, basis.dim), dtype=np.complex128)
    for (i, j) in lattice.neighbor_pairs():
        ai = low[f"a[{i}]"]
        aj = low[f"a[{j}]"]
        hop = hop + lattice.J * (ai.getH() @ aj + aj.getH() @ ai)
    h_static = h_static + hop

    return ModelInstance(
        label="full",
        basis=basis,
        h_static=SparseOperator(basis, h_static, hermitian_hint=True),
        h_drive=SparseOperator(basis, h_drive, hermitian_hint=True),
        drive_power=1,
        omega_ref=params.Omega,
        collapse_ops=tuple(collapse),
        n_cavities=lattice.L,
    )


def build_bose_hubbard(U: float, kappa: float, lattice: LatticeSpec, cap: int,
                       loss_mode: str = "linear",
                       gamma_linear: float = 0.0,
                       gamma_pair: float = 0.0,
                       omega_ref: float = 1.0,
                       safety_bound: int = DEFAULT_SAFETY_BOUND) -> ModelInstance:
    """Effective photon model: U sum a^dag a^dag a a + J hopping + kappa n.

    loss_mode 'linear' attaches (a_l, gamma_linear) per cavity; the
    'linear_plus_pair' mode adds the two-photon channel (a_l^2, gamma_pair/2),
    which makes a doubly occupied cavity decay at the extra rate gamma_pair —
    the state-conditioned pair-loss term of the effective decay formula.

    U and kappa are the values at omega_ref; both scale as Omega^-2 under a
    ramped drive, so they live in h_drive with drive_power = -2.
    """
    if cap < 1:
        raise ValueError("cap must be >= 1")
    if loss_mode not in ("linear", "linear_plus_pair"):
        raise ValueError(f"loss_mode must be 'linear' or 'linear_plus_pair', got {loss_mode!r}")
    modes = [ModeSpec(f"a[{l}]", weight=1, local_cutoff=cap) for l in range(lattice.L)]
    basis = build_basis(modes, cap, safety_bound)

    low = [ladder(basis, l, "lower").matrix for l in range(lattice.L)]
    onsite = sp.csr_matrix((basis.dim, basis.dim), dtype=np.complex128)
    for l in range(lattice.L):
        a = low[l]
        n = (a.getH() @ a).tocsr()
        onsite = onsite + U * (a.getH() @ a.getH() @ a @ a) + kappa * n
    hop = sp.csr_matrix((basis.dim, basis.dim), dtype=np.complex128)
    for (i, j) in lattice.neighbor_pairs():
        hop = hop + lattice.J * (low[i].getH() @ low[j] + low[j].getH() @ low[i])

    collapse: list[tuple[SparseOperator, float]] = []
    for l in range(lattice.L):
        collapse.append((SparseOperator(basis, low[l]), gamma_linear))
        if loss_mode == "linear_plus_pair":
            collapse.append((SparseOperator(basis, low[l] @ low[l]), gamma_pair / 2.0))

    return ModelInstance(
        label="bose_hubbard",
        basis=basis,
        h_static=SparseOperator(basis, hop, hermitian_hint=True),
        h_drive=SparseOperator(basis, onsite, hermitian_hint=True),
        drive_power=-2,
        omega_ref=omega_ref,
        collapse_ops=tuple(collapse),
        n_cavities=lattice.L,
    )


def initial_state(model: ModelInstance, photons_per_cavity: Sequence[int]) -> QuantumState:
    """Product state with the given photons per cavity, all atomic modes empty."""
    if len(photons_per_cavity) != model.n_cavities:
        raise ValueError(f"expected {model.n_cavities} photon numbers, "
                         f"got {len(photons_per_cavity)}")
    occ = [0] * model.basis.n_modes
    for l, n in enumerate(photons_per_cavity):
        if n < 0:
            raise ValueError("photon numbers must be >= 0")
        occ[model.photon_mode(l)] = int(n)
    if not model.basis.contains(occ):
        raise ValueError(
            f"initial photons {list(photons_per_cavity)} violate the basis cap "
            f"{model.basis.excitation_cap} or local cutoffs")
    return QuantumState.from_occupation(model.basis, occ)
