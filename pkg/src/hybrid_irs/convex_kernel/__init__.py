"""Deterministic solvers for the linearized beamforming and reflection subproblems."""
from ._backend import BACKENDS, DEFAULT_BACKEND, get_backend
from .solvers import (
    KKT_TOL,
    DinkelbachState,
    SolveReport,
    dinkelbach_drive,
    sca_lower_bound,
    solve_linear_ball_ellipsoid,
    solve_psi_inner,
    solve_separable_phase,
)

__all__ = [
    "BACKENDS",
    "DEFAULT_BACKEND",
    "KKT_TOL",
    "DinkelbachState",
    "SolveReport",
    "dinkelbach_drive",
    "get_backend",
    "sca_lower_bound",
    "solve_linear_ball_ellipsoid",
    "solve_psi_inner",
    "solve_separable_phase",
]
