"""Microscopic inputs and every closed-form effective quantity.

All frequencies and rates are angular (rad/s resp. 1/s).  The effective
photon-photon repulsion follows the convention

    U = -g24^2 g^2 / (Delta Omega^2),      g = sqrt(N) g13,

so a red-detuned level 4 (Delta < 0) gives a repulsive U > 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Mapping, Optional, Sequence


class NonlinearityUndefinedError(ValueError):
    """Raised when Delta = 0 makes the perturbative nonlinearity undefined."""


@dataclass(frozen=True)
class PhysicalParams:
    """Microscopic atom-cavity inputs for one cavity species.

    Omega    -- drive Rabi frequency on the 2-3 transition (rad/s, > 0)
    g13      -- cavity coupling on the 1-3 transition (rad/s, > 0)
    g24      -- cavity coupling on the 2-4 transition (rad/s, >= 0)
    delta    -- level-3 detuning (rad/s, signed)
    Delta    -- level-4 detuning (rad/s, signed)
    epsilon  -- two-photon detuning (rad/s, signed)
    N        -- atom number (>= 1)
    Gamma_C  -- bare cavity decay rate (1/s, >= 0)
    Gamma_4  -- level-4 spontaneous emission rate (1/s, >= 0)
    """

    Omega: float
    g13: float
    g24: float
    delta: float
    Delta: float
    epsilon: float
    N: int
    Gamma_C: float
    Gamma_4: float

    def __post_init__(self) -> None:
        if not self.Omega > 0:
            raise ValueError(f"Omega must be > 0, got {self.Omega}")
        if not self.g13 > 0:
            raise ValueError(f"g13 must be > 0, got {self.g13}")
        if self.g24 < 0:
            raise ValueError(f"g24 must be >= 0, got {self.g24}")
        if self.N < 1:
            raise ValueError(f"N must be >= 1, got {self.N}")
        if self.Gamma_C < 0:
            raise ValueError(f"Gamma_C must be >= 0, got {self.Gamma_C}")
        if self.Gamma_4 < 0:
            raise ValueError(f"Gamma_4 must be >= 0, got {self.Gamma_4}")

    @property
    def g(self) -> float:
        """Collective coupling sqrt(N) g13."""
        return math.sqrt(self.N) * self.g13


@dataclass(frozen=True)
class DerivedParams:
    """Closed-form effective quantities derived from PhysicalParams."""

    g: float
    B: float
    A: float
    mu_plus: float
    mu_minus: float
    mu_zero: float
    U: float
    kappa: float
    Gamma_linear: float
    Gamma_pair_coeff: float

    def as_dict(self) -> dict:
        return {
            "g": self.g, "B": self.B, "A": self.A,
            "mu_plus": self.mu_plus, "mu_minus": self.mu_minus,
            "mu_zero": self.mu_zero, "U": self.U, "kappa": self.kappa,
            "gamma_linear": self.Gamma_linear,
            "gamma_pair_coeff": self.Gamma_pair_coeff,
        }


@dataclass(frozen=True)
class LatticeSpec:
    """Cavity-array geometry, hopping and optional per-site disorder.

    Override lists, when given, must have length L; scales multiply the
    homogeneous couplings, delta_C adds a per-cavity photon detuning.
    """

    L: int
    J: float
    boundary: str = "periodic"
    delta_C: Optional[Sequence[float]] = None
    g13_scale: Optional[Sequence[float]] = None
    g24_scale: Optional[Sequence[float]] = None
    Omega_scale: Optional[Sequence[float]] = None

    def __post_init__(self) -> None:
        if self.L < 1:
            raise ValueError(f"L must be >= 1, got {self.L}")
        if self.J < 0:
            raise ValueError(f"J must be >= 0, got {self.J}")
        if self.boundary not in ("periodic", "open"):
            raise ValueError(f"boundary must be 'periodic' or 'open', got {self.boundary!r}")
        for name in ("delta_C", "g13_scale", "g24_scale", "Omega_scale"):
            v = getattr(self, name)
            if v is not None:
                v = tuple(float(x) for x in v)
                object.__setattr__(self, name, v)
                if len(v) != self.L:
                    raise ValueError(f"{name} must have length L={self.L}, got {len(v)}")

    def neighbor_pairs(self) -> list[tuple[int, int]]:
        """Unordered nearest-neighbor pairs, each counted once."""
        if self.L == 1:
            return []
        pairs = [(l, l + 1) for l in range(self.L - 1)]
        if self.boundary == "periodic" and self.L > 2:
            pairs.append((self.L - 1, 0))
        return pairs

    def site_value(self, name: str, site: int, default: float = 1.0) -> float:
        v = getattr(self, name)
        if v is None:
            return default
        return v[site]


@dataclass(frozen=True)
class DriveRamp:
    """Piecewise-linear drive schedule Omega(t), clamped outside the knots."""

    knots: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        knots = tuple((float(t), float(om)) for t, om in self.knots)
        object.__setattr__(self, "knots", knots)
        if not knots:
            raise ValueError("ramp needs at least one knot")
        times = [t for t, _ in knots]
        if any(t1 <= t0 for t0, t1 in zip(times, times[1:])):
            raise ValueError("knot times must be strictly increasing")
        if any(om <= 0 for _, om in knots):
            raise ValueError("Omega values must be > 0")

    @classmethod
    def constant(cls, Omega: float) -> "DriveRamp":
        return cls(((0.0, float(Omega)),))

    @classmethod
    def linear(cls, t0: float, Omega0: float, t1: float, Omega1: float) -> "DriveRamp":
        return cls(((float(t0), float(Omega0)), (float(t1), float(Omega1))))

    @property
    def is_constant(self) -> bool:
        return len(self.knots) == 1 or all(
            om == self.knots[0][1] for _, om in self.knots)

    def at(self, t: float) -> float:
        """Omega(t): linear between knots, clamped to the end values outside."""
        knots = self.knots
        if t <= knots[0][0]:
            return knots[0][1]
        if t >= knots[-1][0]:
            return knots[-1][1]
        for (t0, om0), (t1, om1) in zip(knots, knots[1:]):
            if t <= t1:
                return om0 + (om1 - om0) * (t - t0) / (t1 - t0)
        return knots[-1][1]  # unreachable


@dataclass(frozen=True)
class ValidityCheck:
    """One regime check: passes when ratio <= threshold.

    A relative grace of 1e-12 absorbs float round-off: the paper's worked
    example sits exactly on the 0.1 boundary and must count as passing.
    """

    name: str
    ratio: float
    threshold: float

    @property
    def passed(self) -> bool:
        return self.ratio <= self.threshold * (1.0 + 1e-12)


@dataclass(frozen=True)
class ValidityReport:
    checks: tuple[ValidityCheck, ...]

    @property
    def overall_pass(self) -> bool:
        return all(c.passed for c in self.checks)

    def as_dict(self) -> dict:
        return {
            "checks": [
                {"name": c.name, "ratio": c.ratio, "threshold": c.threshold,
                 "pass": c.passed}
                for c in self.checks
            ],
            "overall_pass": self.overall_pass,
        }


#: Default regime thresholds.  The paper's worked example sits exactly at 0.1
#: for the coupling ratios; the lattice scales use 1e-2.
DEFAULT_THRESHOLDS: Mapping[str, float] = {
    "g_over_Omega": 0.1,
    "g24g_over_DeltaOmega": 0.1,
    "g24_over_Omega": 0.1,
    "Delta_over_Omega": 0.1,
    "J_over_mu_minus_gap": 1e-2,
    "J_over_mu_plus_gap": 1e-2,
    "deltaC_over_mu_gap": 1e-2,
    "deltaC_over_U": 1.0,
}


def derive(params: PhysicalParams) -> DerivedParams:
    """All closed-form derived quantities.

    Raises NonlinearityUndefinedError for Delta = 0 (U and the pair-loss
    coefficient are undefined there).
    """
    g = params.g
    B = math.hypot(g, params.Omega)
    A = math.hypot(2.0 * B, params.delta)
    mu_plus = (params.delta + A) / 2.0
    mu_minus = (params.delta - A) / 2.0
    if params.Delta == 0.0:
        raise NonlinearityUndefinedError(
            "nonlinearity undefined at Delta=0 (fields: U, Gamma_pair_coeff)")
    g_sq = params.N * params.g13 * params.g13
    om_sq = params.Omega * params.Omega
    U = -params.g24 ** 2 * g_sq / (params.Delta * om_sq)
    kappa = params.epsilon * g_sq / om_sq
    pair = params.g24 ** 2 * g_sq / (params.Delta ** 2 * om_sq) * params.Gamma_4
    return DerivedParams(
        g=g, B=B, A=A, mu_plus=mu_plus, mu_minus=mu_minus, mu_zero=0.0,
        U=U, kappa=kappa, Gamma_linear=params.Gamma_C, Gamma_pair_coeff=pair,
    )


def check_validity(params: PhysicalParams, lattice: LatticeSpec,
                   thresholds: Optional[Mapping[str, float]] = None) -> ValidityReport:
    """Regime checks behind the perturbative effective model.

    Failing checks are reported, never raised.
    """
    th = dict(DEFAULT_THRESHOLDS)
    if thresholds:
        unknown = set(thresholds) - set(th)
        if unknown:
            raise KeyError(f"unknown validity thresholds: {sorted(unknown)}")
        th.update(thresholds)
    d = derive(params)
    gap_minus = abs(d.mu_minus - d.mu_zero)
    gap_plus = abs(d.mu_plus - d.mu_zero)
    max_dC = max((abs(x) for x in lattice.delta_C), default=0.0) \
        if lattice.delta_C is not None else 0.0
    gap_min = min(gap_minus, gap_plus)
    # g24 = 0 means U = 0: any nonzero cavity detuning then dominates
    dC_over_U = 0.0 if max_dC == 0.0 else (
        max_dC / abs(d.U) if d.U != 0.0 else math.inf)

    checks = [
        ValidityCheck("g_over_Omega", d.g / params.Omega, th["g_over_Omega"]),
        ValidityCheck("g24g_over_DeltaOmega",
                      params.g24 * d.g / abs(params.Delta * params.Omega),
                      th["g24g_over_DeltaOmega"]),
        ValidityCheck("g24_over_Omega", params.g24 / params.Omega,
                      th["g24_over_Omega"]),
        ValidityCheck("Delta_over_Omega", abs(params.Delta) / params.Omega,
                      th["Delta_over_Omega"]),
        ValidityCheck("J_over_mu_minus_gap", lattice.J / gap_minus,
                      th["J_over_mu_minus_gap"]),
        ValidityCheck("J_over_mu_plus_gap", lattice.J / gap_plus,
                      th["J_over_mu_plus_gap"]),
        ValidityCheck("deltaC_over_mu_gap", max_dC / gap_min,
                      th["deltaC_over_mu_gap"]),
        # Mott relevance: the nonlinearity must dominate any cavity detuning
        ValidityCheck("deltaC_over_U", dC_over_U, th["deltaC_over_U"]),
    ]
    return ValidityReport(tuple(checks))


def figure_of_merit(params: PhysicalParams, gamma_convention: str = "cavity") -> float:
    """|U| / Gamma.

    gamma_convention 'cavity' uses Gamma = Gamma_C (the paper's 625 for the
    micro-toroid numbers); 'with_pair_loss' adds the two-photon coefficient.
    """
    d = derive(params)
    if gamma_convention == "cavity":
        gamma = d.Gamma_linear
    elif gamma_convention == "with_pair_loss":
        gamma = d.Gamma_linear + d.Gamma_pair_coeff
    else:
        raise ValueError(f"unknown gamma_convention {gamma_convention!r}")
    if gamma == 0.0:
        raise ZeroDivisionError("undefined figure of merit: Gamma = 0")
    return abs(d.U) / gamma


def gain_vs_legacy(params: PhysicalParams) -> float:
    """U gain over the legacy regime choice |Delta| = 10 g24.

    Since U is proportional to 1/Delta the gain is 10 g24 / |Delta|.
    """
    if params.Delta == 0.0:
        raise NonlinearityUndefinedError(
            "nonlinearity undefined at Delta=0 (fields: U, Gamma_pair_coeff)")
    if params.g24 == 0.0:
        raise ValueError("gain undefined for g24 = 0")
    delta_legacy = 10.0 * params.g24 * math.copysign(1.0, params.Delta)
    u = derive(params).U
    u_legacy = derive(replace(params, Delta=delta_legacy)).U
    return u / u_legacy
