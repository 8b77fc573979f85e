"""Truncated multimode Fock bases and sparse operator algebra.

Every Hamiltonian, ladder and collapse operator in the toolkit is a
:class:`SparseOperator` over a :class:`FockBasis`.  A basis enumerates all
occupation vectors ``n`` with ``sum_i weight_i * n_i <= excitation_cap`` and
``n_i <= local_cutoff_i``; the per-mode weights encode the conserved
excitation number of the rotating-frame dynamics (photons and the first two
atomic modes count once, the uppermost atomic mode counts twice).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence, TextIO

import numpy as np
import scipy.sparse as sp

DEFAULT_SAFETY_BOUND = 1_000_000

# Below this dimension dense linear algebra is allowed as a backend detail;
# 3-site problems here stay <= 250 states.
DENSE_THRESHOLD = 512

HERMITICITY_RTOL = 1e-12


class BasisTooLargeError(RuntimeError):
    """Raised when the enumerated basis would exceed the safety bound."""


class BasisMismatchError(ValueError):
    """Raised when operators or states over different bases are combined."""


class ZeroNormStateError(ValueError):
    """Raised when an expectation value is requested for a zero-norm state."""


@dataclass(frozen=True)
class ModeSpec:
    """One bosonic mode: a label, its excitation weight and local cutoff."""

    label: str
    weight: int = 1
    local_cutoff: int = 0

    def __post_init__(self) -> None:
        if self.weight < 1:
            raise ValueError(f"mode {self.label!r}: weight must be >= 1, got {self.weight}")
        if self.local_cutoff < 0:
            raise ValueError(f"mode {self.label!r}: local_cutoff must be >= 0")


class FockBasis:
    """Canonically ordered truncated occupation-number basis.

    States are sorted lexicographically on the occupation vector; ``index``
    inverts the ordering.  Instances are immutable and shareable.
    """

    def __init__(self, modes: Sequence[ModeSpec], excitation_cap: int,
                 states: np.ndarray):
        self.modes = tuple(modes)
        self.excitation_cap = int(excitation_cap)
        self.states = states  # (dim, n_modes) int array, lexicographically sorted
        self.states.setflags(write=False)
        self.weights = np.array([m.weight for m in self.modes], dtype=np.int64)
        self.weights.setflags(write=False)
        self._index = {tuple(row): k for k, row in enumerate(states)}
        self._label_to_mode = {m.label: i for i, m in enumerate(self.modes)}

    @property
    def dim(self) -> int:
        return self.states.shape[0]

    @property
    def n_modes(self) -> int:
        return len(self.modes)

    def index_of(self, occupation: Sequence[int]) -> int:
        """Dense index of an occupation vector; KeyError if outside the basis."""
        return self._index[tuple(int(n) for n in occupation)]

    def contains(self, occupation: Sequence[int]) -> bool:
        return tuple(int(n) for n in occupation) in self._index

    def occupation(self, k: int) -> tuple[int, ...]:
        return tuple(int(n) for n in self.states[k])

    def mode_index(self, label: str) -> int:
        try:
            return self._label_to_mode[label]
        except KeyError:
            raise KeyError(f"no mode labelled {label!r} in basis "
                           f"(labels: {[m.label for m in self.modes]})") from None

    def total_weight(self) -> np.ndarray:
        """Weighted excitation number of every basis state."""
        return self.states @ self.weights

    def __eq__(self, other: object) -> bool:
        return self is other or (
            isinstance(other, FockBasis)
            and self.modes == other.modes
            and self.excitation_cap == other.excitation_cap
        )

    def __hash__(self) -> int:
        return hash((self.modes, self.excitation_cap))

    def __repr__(self) -> str:
        return (f"FockBasis(dim={self.dim}, n_modes={self.n_modes}, "
                f"cap={self.excitation_cap})")


def build_basis(modes: Sequence[ModeSpec], excitation_cap: int,
                safety_bound: int = DEFAULT_SAFETY_BOUND) -> FockBasis:
    """Enumerate every occupation vector within the cap and cutoffs.

    Raises BasisTooLargeError as soon as the enumeration exceeds
    ``safety_bound`` states.
    """
    if not modes:
        raise ValueError("modes must be nonempty")
    if excitation_cap < 0:
        raise ValueError("excitation_cap must be >= 0")

    weights = [m.weight for m in modes]
    cutoffs = [m.local_cutoff for m in modes]
    states: list[tuple[int, ...]] = []

    def extend(prefix: list[int], budget: int, mode: int) -> None:
        if mode == len(modes):
            states.append(tuple(prefix))
            if len(states) > safety_bound:
                raise BasisTooLargeError(
                    f"basis too large: more than {safety_bound} states "
                    f"(cap={excitation_cap}, modes={len(modes)})")
            return
        top = min(cutoffs[mode], budget // weights[mode])
        for n in range(top + 1):
            prefix.append(n)
            extend(prefix, budget - n * weights[mode], mode + 1)
            prefix.pop()

    extend([], excitation_cap, 0)
    # recursion over ascending occupations yields lexicographic order already,
    # but sort defensively so the ordering contract never depends on it
    arr = np.array(sorted(states), dtype=np.int64)
    return FockBasis(modes, excitation_cap, arr)


class SparseOperator:
    """Complex sparse matrix tied to a basis, with a hermiticity hint."""

    def __init__(self, basis: FockBasis, matrix: sp.spmatrix,
                 hermitian_hint: bool = False):
        mat = sp.csr_matrix(matrix, dtype=np.complex128)
        if mat.shape != (basis.dim, basis.dim):
            raise ValueError(f"matrix shape {mat.shape} does not match basis dim {basis.dim}")
        self.basis = basis
        self.matrix = mat
        self.hermitian_hint = bool(hermitian_hint)
        if self.hermitian_hint:
            scale = max(np.abs(mat.data).max() if mat.nnz else 0.0, 1.0)
            dev = abs(mat - mat.getH())
            if dev.nnz and dev.data.max() > HERMITICITY_RTOL * scale:
                raise ValueError("hermitian_hint set but operator is not Hermitian")

    # -- algebra ---------------------------------------------------------

    def _check_basis(self, other: "SparseOperator") -> None:
        if self.basis != other.basis:
            raise BasisMismatchError(
                f"operators live on different bases: {self.basis} vs {other.basis}")

    def __add__(self, other: "SparseOperator") -> "SparseOperator":
        self._check_basis(other)
        return SparseOperator(self.basis, self.matrix + other.matrix,
                              self.hermitian_hint and other.hermitian_hint)

    def __sub__(self, other: "SparseOperator") -> "SparseOperator":
        self._check_basis(other)
        return SparseOperator(self.basis, self.matrix - other.matrix,
                              self.hermitian_hint and other.hermitian_hint)

    def __mul__(self, scalar: complex) -> "SparseOperator":
        z = complex(scalar)
        return SparseOperator(self.basis, self.matrix * z,
                              self.hermitian_hint and z.imag == 0.0)

    __rmul__ = __mul__

    def __matmul__(self, other: "SparseOperator") -> "SparseOperator":
        self._check_basis(other)
        return SparseOperator(self.basis, self.matrix @ other.matrix, False)

    def adjoint(self) -> "SparseOperator":
        return SparseOperator(self.basis, self.matrix.getH().tocsr(),
                              self.hermitian_hint)

    def apply(self, vec: np.ndarray) -> np.ndarray:
        return self.matrix @ vec

    def to_dense(self) -> np.ndarray:
        return self.matrix.toarray()

    @property
    def nnz(self) -> int:
        return self.matrix.nnz

    def max_abs(self) -> float:
        return float(np.abs(self.matrix.data).max()) if self.matrix.nnz else 0.0

    def hermiticity_defect(self) -> float:
        """max |M - M^dag| over max |M| (0 for the zero operator)."""
        scale = self.max_abs()
        if scale == 0.0:
            return 0.0
        dev = abs(self.matrix - self.matrix.getH())
        return float(dev.data.max() / scale) if dev.nnz else 0.0

    def dump_triplets(self, stream: TextIO) -> None:
        """Debug dump, one 'row,col,re,im' line per stored entry."""
        coo = self.matrix.tocoo()
        order = np.lexsort((coo.col, coo.row))
        for k in order:
            v = coo.data[k]
            stream.write(f"{coo.row[k]},{coo.col[k]},"
                         f"{float(v.real)!r},{float(v.imag)!r}\n")

    def __repr__(self) -> str:
        return (f"SparseOperator(dim={self.basis.dim}, nnz={self.nnz}, "
                f"hermitian_hint={self.hermitian_hint})")


def zero_operator(basis: FockBasis) -> SparseOperator:
    return SparseOperator(basis, sp.csr_matrix((basis.dim, basis.dim)), True)


def identity(basis: FockBasis) -> SparseOperator:
    return SparseOperator(basis, sp.identity(basis.dim, format="csr"), True)


def ladder(basis: FockBasis, mode: int, kind: str) -> SparseOperator:
    """Bosonic raising/lowering operator for one mode.

    <n+1_m| raise |n> = sqrt(n_m + 1) whenever the target state is inside the
    basis; amplitudes leaving the truncated basis are silently zero.  ``lower``
    is the exact adjoint.
    """
    if not 0 <= mode < basis.n_modes:
        raise ValueError(f"mode {mode} out of range for {basis}")
    if kind not in ("raise", "lower"):
        raise ValueError(f"kind must be 'raise' or 'lower', got {kind!r}")

    rows, cols, vals = [], [], []
    for k in range(basis.dim):
        occ = list(basis.states[k])
        if occ[mode] == 0:
            continue
        amp = np.sqrt(occ[mode])
        occ[mode] -= 1
        j = basis.index_of(occ)  # removing a quantum always stays in the basis
        # lower: |n> -> sqrt(n)|n-1>;  raise is the transpose
        rows.append(j)
        cols.append(k)
        vals.append(amp)
    low = sp.csr_matrix((vals, (rows, cols)), shape=(basis.dim, basis.dim),
                        dtype=np.complex128)
    return SparseOperator(basis, low if kind == "lower" else low.T.tocsr())


def number_op(basis: FockBasis, mode: int) -> SparseOperator:
    """n_m = raise * lower, diagonal in the occupation basis."""
    diag = basis.states[:, mode].astype(np.complex128)
    return SparseOperator(basis, sp.diags(diag, format="csr"), True)


def weighted_number_op(basis: FockBasis) -> SparseOperator:
    """Total weighted excitation number; commutes with every model Hamiltonian."""
    diag = basis.total_weight().astype(np.complex128)
    return SparseOperator(basis, sp.diags(diag, format="csr"), True)


class QuantumState:
    """Pure state vector or density matrix over a FockBasis."""

    def __init__(self, basis: FockBasis, payload: np.ndarray):
        payload = np.asarray(payload, dtype=np.complex128)
        if payload.ndim == 1:
            if payload.shape != (basis.dim,):
                raise ValueError(f"vector length {payload.shape} != basis dim {basis.dim}")
        elif payload.ndim == 2:
            if payload.shape != (basis.dim, basis.dim):
                raise ValueError(f"matrix shape {payload.shape} != basis dim {basis.dim}")
            scale = max(np.abs(payload).max(), 1.0)
            if np.abs(payload - payload.conj().T).max() > 1e-10 * scale:
                raise ValueError("density matrix is not Hermitian to 1e-10")
        else:
            raise ValueError("payload must be a vector or a square matrix")
        self.basis = basis
        self.payload = payload

    @property
    def is_pure(self) -> bool:
        return self.payload.ndim == 1

    @classmethod
    def from_occupation(cls, basis: FockBasis, occupation: Sequence[int]) -> "QuantumState":
        vec = np.zeros(basis.dim, dtype=np.complex128)
        vec[basis.index_of(occupation)] = 1.0
        return cls(basis, vec)

    def norm(self) -> float:
        if self.is_pure:
            return float(np.linalg.norm(self.payload))
        return float(np.trace(self.payload).real)

    def normalized(self) -> "QuantumState":
        n = self.norm()
        if n <= 0.0:
            raise ZeroNormStateError("cannot normalize a zero-norm state")
        return QuantumState(self.basis, self.payload / n)

    def to_density_matrix(self) -> "QuantumState":
        if self.is_pure:
            return QuantumState(self.basis, np.outer(self.payload, self.payload.conj()))
        return self


def expectation(state: QuantumState, op: SparseOperator) -> complex:
    """<O> normalized by the state norm (trajectory states are sub-normalized)."""
    if state.basis != op.basis:
        raise BasisMismatchError(
            f"state and operator bases differ: {state.basis} vs {op.basis}")
    if state.is_pure:
        psi = state.payload
        nrm = np.vdot(psi, psi).real
        if nrm <= 0.0:
            raise ZeroNormStateError("expectation of a zero-norm state")
        return complex(np.vdot(psi, op.matrix @ psi) / nrm)
    rho = state.payload
    tr = np.trace(rho)
    if abs(tr) <= 0.0:
        raise ZeroNormStateError("expectation of a zero-trace density matrix")
    return complex((op.matrix @ rho).diagonal().sum() / tr)
