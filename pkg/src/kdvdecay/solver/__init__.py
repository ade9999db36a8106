"""Time stepping for the damped KdV system on [0, L]."""

from .config import SCHEMES, SolverConfig, State, Trajectory
from .integrate import Recorder, linear_propagator, solve, solve_picard
from .steppers import (
    CnNewtonStepper,
    CrankNicolsonMap,
    ImexStepper,
    nonlinear_term,
    step_cn_newton,
    step_imex,
)

__all__ = [
    "SCHEMES", "SolverConfig", "State", "Trajectory",
    "Recorder", "linear_propagator", "solve", "solve_picard",
    "CnNewtonStepper", "CrankNicolsonMap", "ImexStepper",
    "nonlinear_term", "step_cn_newton", "step_imex",
]
