"""photonmott: strong photon-photon nonlinearities in EIT-coupled cavity arrays.

Computes the effective Bose-Hubbard parameters of the driven four-level
atom-cavity system, simulates the full microscopic model and the effective
model under dissipation (Lindblad master equation and quantum-jump
trajectories), and reproduces the photonic Mott-insulator and
Mott-to-superfluid scenarios at desk scale.
"""

from .parameters import (
    DEFAULT_THRESHOLDS,
    DerivedParams,
    DriveRamp,
    LatticeSpec,
    NonlinearityUndefinedError,
    PhysicalParams,
    ValidityCheck,
    ValidityReport,
    check_validity,
    derive,
    figure_of_merit,
    gain_vs_legacy,
)
from .fockspace import (
    BasisMismatchError,
    BasisTooLargeError,
    FockBasis,
    ModeSpec,
    QuantumState,
    SparseOperator,
    ZeroNormStateError,
    build_basis,
    expectation,
    identity,
    ladder,
    number_op,
    weighted_number_op,
)
from .models import ModelInstance, build_bose_hubbard, build_full, initial_state
from .polariton import (
    DarkBranchError,
    PolaritonSet,
    SpectrumReport,
    dark_fock_vector,
    nonlinear_shift_oracle,
    polariton_set,
    spectrum_check,
)
from .dynamics import (
    EnsembleStats,
    IntegrationError,
    IntegratorConfig,
    JumpDegeneracyError,
    MasterResult,
    TrajectoryRecord,
    evolve_master,
    evolve_trajectory,
    run_ensemble,
)
from .observables import (
    TimeSeries,
    compare_models,
    deviation_maxima,
    ensemble_loss_probability,
    photon_fluctuation,
    photon_number,
    series_from_ensemble,
    series_from_master,
    series_from_record,
    survival_probability,
)

__version__ = "0.1.0"
