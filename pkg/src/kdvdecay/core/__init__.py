"""Grids, weights, damping profiles, difference operators and quadrature."""

from .banded import BandedLU, band_from_sparse, solve_band, sparse_from_band
from .damping import DampingProfile, build_custom_damping, build_damping, constant_damping
from .grid import Grid, build_grid
from .operators import (
    OperatorSet,
    boundary_trace,
    build_operators,
    embed,
    first_difference,
    interior,
    node_derivative,
    node_second_derivative,
    one_sided_trace,
    quadrature,
    second_difference,
    third_difference,
    trapezoid_weights,
)
from .weights import WeightSpec, build_custom_weight, build_weight, weight_from_key

__all__ = [
    "BandedLU", "band_from_sparse", "solve_band", "sparse_from_band",
    "DampingProfile", "build_custom_damping", "build_damping", "constant_damping",
    "Grid", "build_grid",
    "OperatorSet", "boundary_trace", "build_operators", "embed", "first_difference", "interior",
    "node_derivative", "node_second_derivative", "one_sided_trace", "quadrature",
    "second_difference", "third_difference", "trapezoid_weights",
    "WeightSpec", "build_custom_weight", "build_weight", "weight_from_key",
]
