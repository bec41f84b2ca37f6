"""Numerical workbench for capillary minimal and CMC cones over isoparametric foliations."""

from .errors import CapconesError
from .foliation import FoliationTriple, validate
from .profile_ode import OdeProblem, ProfileState, integrate
from .shooting import (
    CapillarySolution,
    find_a_star,
    sweep,
    type1_solve_for_theta,
    type1_theta_of_a,
    type2_solve,
    type2_symmetric_solve,
)
from .topology import classify

__all__ = [
    "CapconesError",
    "FoliationTriple",
    "validate",
    "OdeProblem",
    "ProfileState",
    "integrate",
    "CapillarySolution",
    "find_a_star",
    "sweep",
    "type1_solve_for_theta",
    "type1_theta_of_a",
    "type2_solve",
    "type2_symmetric_solve",
    "classify",
]

__version__ = "0.1.0"
