"""Geodesic Riesz energies on spheres: Gegenbauer coefficients, energy
integrals, point-set optimization and discrepancy diagnostics."""
__version__ = "0.1.0"

from .errors import (
    CertificationError,
    DomainError,
    NotPositiveDefiniteError,
    QuadratureError,
    SingularEnergyError,
)
from .specfun import SphereContext
from .potential import PotentialSpec
from .coefficients import CoefficientTable, coefficient_table, gegenbauer_coefficient
from .energy import MeasureSpec, PointSet, discrete_energy, measure_energy, uniform_energy
from .pointsets import OptimizerOptions, equal_area_partition, generate, optimize_energy
from .discrepancy import cap_discrepancy, stolarsky_check
