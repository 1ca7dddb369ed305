"""Exact open-system dynamics by diagonalizing a system plus a discretized bath."""

__version__ = "0.1.0"

from .bath import (
    BathSpec,
    DiscretizedBath,
    Statistics,
    counterterm,
    discretize,
    flat_bath,
    resolution_report,
    thermal_occupation,
)
from .dynamics import Propagator, TimeGrid, Trajectory, m_matrix, occupations, run, two_time_correlation
from .eigen import EigenDecomposition, diagonalize
from .estimator import DiscretizedEnvironment
from .model import Level, ReducedHamiltonian, SystemSpec, build_hamiltonian, three_level_preset, two_level_preset
from .oracle import OdeSpec, fit_decay_rate, propagate_ode, thermal_asymptote
from .spectral import KernelSample, QuadratureSpec, SpectralFunction, analytic_kernel, discrete_kernel, evaluate

__all__ = [
    "BathSpec", "DiscretizedBath", "Statistics", "counterterm", "discretize", "flat_bath",
    "resolution_report", "thermal_occupation",
    "Propagator", "TimeGrid", "Trajectory", "m_matrix", "occupations", "run", "two_time_correlation",
    "EigenDecomposition", "diagonalize",
    "DiscretizedEnvironment",
    "Level", "ReducedHamiltonian", "SystemSpec", "build_hamiltonian", "three_level_preset", "two_level_preset",
    "OdeSpec", "fit_decay_rate", "propagate_ode", "thermal_asymptote",
    "KernelSample", "QuadratureSpec", "SpectralFunction", "analytic_kernel", "discrete_kernel", "evaluate",
]
