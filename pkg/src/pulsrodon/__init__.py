"""Numerical laboratory for pulsating-rotating vortex states of a rotating,
non-isothermal magnetogasdynamic flow in the plane.

The package integrates a ten-component reduction of the governing
equations, constructs multi-parameter solutions in closed form on the
constrained branch, and machine-verifies the structures that make the
reduction integrable: algebraic constants of the motion, an amplitude
first integral, a coupled nonlinear-oscillator (Ermakov-Ray-Reid) pair for
the density-ellipse semi-axes, and an isospectral operator-pair
formulation in stretched time.
"""

from .model import (
    ConfigError,
    DomainError,
    DynState,
    IntegralSet,
    Inconsistent,
    OmegaCollapse,
    Params,
    PulsrodonError,
    SqrtDomain,
    StepFailure,
    derive_constants,
    epsilon1,
    epsilon2,
    validate_params,
)
from .dynsys import Trajectory, integrate, monitor_invariants, rhs, theorem1_quantities
from .exact import ExactSolution, build_state, solve_omega, translation_solve
from .kernels import backend_name

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "backend_name",
    "build_state",
    "ConfigError",
    "derive_constants",
    "DomainError",
    "DynState",
    "epsilon1",
    "epsilon2",
    "ExactSolution",
    "Inconsistent",
    "IntegralSet",
    "integrate",
    "monitor_invariants",
    "OmegaCollapse",
    "Params",
    "PulsrodonError",
    "rhs",
    "solve_omega",
    "SqrtDomain",
    "StepFailure",
    "theorem1_quantities",
    "Trajectory",
    "translation_solve",
    "validate_params",
]
