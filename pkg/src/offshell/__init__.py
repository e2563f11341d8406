"""Renormalized radiation-reaction dynamics above the mass shell.

Simulates the 4th-order renormalized equation of motion of a charged
event in 5D off-shell electrodynamics, in both the 12-D vector and the
reduced 6-scalar formulations, with configurable-precision arithmetic,
finite-time blow-up detection, and local eigenvalue stability analysis.
"""

__version__ = "0.1.0"

from .core import (FourVector, ModelParams, ScalarState, WorldlineState,
                   epsilon_of, minkowski_dot, scalars_of, three_velocity)
from .dynamics import (KPotentials, constant_eps_fixed_point,
                       d_coefficient_pull, k_positive_part, k_potentials,
                       mass_matrix_contraction_check, scalar_rhs, vector_rhs,
                       worldline_from_scalars)
from .errors import (ConfigError, ConvergenceError, DomainError,
                     DomainStepError, FitError, OffshellError, PoleError)
from .integrator import (Outcome, Trajectory, blowup_time_estimate, integrate,
                         step_rk45, sweep_D)
from .numerics import precision, real, set_precision
from .stability import (EigenSpectrum, JacobianMatrix, classify_local,
                        eigenvalues, jacobian)

__all__ = [
    "FourVector", "ModelParams", "ScalarState", "WorldlineState",
    "epsilon_of", "minkowski_dot", "scalars_of", "three_velocity",
    "KPotentials", "constant_eps_fixed_point", "d_coefficient_pull",
    "k_positive_part", "k_potentials", "mass_matrix_contraction_check",
    "scalar_rhs", "vector_rhs", "worldline_from_scalars",
    "ConfigError", "ConvergenceError", "DomainError", "DomainStepError",
    "FitError", "OffshellError", "PoleError",
    "Outcome", "Trajectory", "blowup_time_estimate", "integrate",
    "step_rk45", "sweep_D",
    "precision", "real", "set_precision",
    "EigenSpectrum", "JacobianMatrix", "classify_local", "eigenvalues",
    "jacobian",
]
