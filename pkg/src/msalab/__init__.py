"""Finite-volume Anderson model: multiscale-analysis hypothesis checks and localization diagnostics."""

from .ensemble import BoundaryCondition, DisorderModel, EnvironmentSample, assemble, hamiltonian, sample_environment
from .errors import CapacityError, DomainError, NumericalError, SingularEnergyError, ValidationError
from .geometry import BoxSpec, Separation, is_inside_thick, nonoverlapping
from .montecarlo import MonteCarloEstimate

__version__ = "0.1.0"

__all__ = [
    "BoundaryCondition", "DisorderModel", "EnvironmentSample", "assemble", "hamiltonian", "sample_environment",
    "CapacityError", "DomainError", "NumericalError", "SingularEnergyError", "ValidationError",
    "BoxSpec", "Separation", "is_inside_thick", "nonoverlapping", "MonteCarloEstimate",
]
