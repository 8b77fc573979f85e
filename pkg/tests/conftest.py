import math

import pytest

from photonmott import LatticeSpec, PhysicalParams

SQRT_N = math.sqrt(1000.0)


@pytest.fixture
def fig2_params() -> PhysicalParams:
    """Three-toroid Mott scenario inputs (Omega = 20 sqrt(N) g13)."""
    return PhysicalParams(
        Omega=20.0 * SQRT_N * 2.5e9, g13=2.5e9, g24=2.5e9,
        delta=1.0e11, Delta=-1.25e9, epsilon=0.0,
        N=1000, Gamma_C=0.4e5, Gamma_4=1.6e7)


@pytest.fixture
def fig2_lattice() -> LatticeSpec:
    return LatticeSpec(L=3, J=1.2e6, boundary="periodic")


@pytest.fixture
def toroid_merit_params() -> PhysicalParams:
    """Worked micro-toroid numbers: g/Omega = g24 g/|Delta Omega| = 0.1."""
    g = SQRT_N * 2.5e9
    return PhysicalParams(
        Omega=10.0 * g, g13=2.5e9, g24=2.5e9,
        delta=1.0e11, Delta=-2.5e9, epsilon=0.0,
        N=1000, Gamma_C=0.4e5, Gamma_4=1.6e7)


@pytest.fixture
def legacy_gain_params() -> PhysicalParams:
    """Omega = 100 g with |Delta| = g24/10: gain factor 100 over legacy."""
    g = SQRT_N * 2.5e9
    return PhysicalParams(
        Omega=100.0 * g, g13=2.5e9, g24=2.5e9,
        delta=1.0e11, Delta=-2.5e8, epsilon=0.0,
        N=1000, Gamma_C=0.4e5, Gamma_4=1.6e7)
