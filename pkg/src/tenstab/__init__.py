"""Static stability of a gravity-loaded three-spring tensegrity joint."""
from .energy import (
    DegenerateFitError,
    EnergyEval,
    GeometricModel,
    ReducedModel,
    fd_gradient,
    fd_hessian,
    fit_reduced_coefficients,
    fit_reduced_samples,
    gravity_energy,
    reference_reduced_model,
    spring_energy,
    total_energy,
)
from .geometry import MechanismGeometry, TiltConfig, joint_rotation, spring_endpoints, spring_lengths
from .stability import (
    BracketError,
    Equilibrium,
    Stability,
    SweepResult,
    critical_stiffness,
    find_equilibria_1d,
    find_equilibria_2d,
    no_rest_at_zero_check,
    stiffness_sweep,
)

__version__ = "0.1.0"
