"""Time-evolution engines: Lindblad master equation and quantum-jump trajectories."""

from .ensemble import EnsembleStats, ensemble_columns, observable_row, run_ensemble
from .integrator import Dopri5, IntegrationError, IntegratorConfig
from .master import MasterResult, evolve_master
from .trajectory import (
    EigPropagator,
    JumpDegeneracyError,
    TrajectoryRecord,
    default_max_step,
    evolve_trajectory,
    trajectory_rng,
)

__all__ = [
    "Dopri5",
    "EigPropagator",
    "EnsembleStats",
    "IntegrationError",
    "IntegratorConfig",
    "JumpDegeneracyError",
    "MasterResult",
    "TrajectoryRecord",
    "default_max_step",
    "ensemble_columns",
    "evolve_master",
    "evolve_trajectory",
    "observable_row",
    "run_ensemble",
    "trajectory_rng",
]
