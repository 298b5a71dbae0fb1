"""Ideal circle patterns on surfaces with spherical cone metrics.

Solves for per-vertex circle radii realizing prescribed total geodesic
curvatures, by integrating curvature flows in log-cotangent coordinates
or by Newton iteration on the associated convex potential, with exact
feasibility certification of the prescription.
"""

from .curvature import (CurvatureState, calabi_energy, evaluate, potential,
                        prescribed_calabi_energy, velocity_bound)
from .errors import (DomainError, InputError, IntegrationError,
                     NonConvergenceError, ParseError, QuadratureError,
                     SizeError)
from .feasibility import FeasibilityVerdict, check_bruteforce, check_mincut
from .flow import (FlowConfig, FlowSample, FlowTrace, RateFit, calabi_rhs,
                   curvature_rhs, fit_decay_rate, newton_solve, run)
from .geometry import (EdgeSideGeometry, edge_side_geometry, k_to_r,
                       quad_angle, r_to_k, side_curvature)
from .instancefile import (Instance, instance_digest, parse_instance,
                           serialize_instance)
from .oracle import (SyntheticInstance, fd_gradient, fd_jacobian,
                     make_synthetic, relative_error, rng_for)
from .surface import (Prescription, SurfaceComplex, build_complex, degree,
                      edge_neighborhood, validate)

__version__ = "0.1.0"

__all__ = [
    "CurvatureState", "DomainError", "EdgeSideGeometry", "FeasibilityVerdict",
    "FlowConfig", "FlowSample", "FlowTrace", "InputError", "IntegrationError",
    "Instance", "NonConvergenceError", "ParseError", "Prescription",
    "QuadratureError", "RateFit", "SizeError", "SurfaceComplex",
    "SyntheticInstance", "build_complex", "calabi_energy", "calabi_rhs",
    "check_bruteforce", "check_mincut", "curvature_rhs", "degree",
    "edge_neighborhood", "edge_side_geometry", "evaluate", "fd_gradient",
    "fd_jacobian", "fit_decay_rate", "k_to_r", "make_synthetic",
    "newton_solve", "potential", "prescribed_calabi_energy", "quad_angle",
    "r_to_k", "relative_error", "rng_for", "run", "side_curvature",
    "validate", "velocity_bound", "instance_digest", "parse_instance",
    "serialize_instance",
]
