"""Nonlinear Poisson-Boltzmann lab: Python bindings."""

from ._core import (
    NpbeError,
    __version__,
    contraction_bound,
    predict_error,
    shoot,
    small_data_bounds,
    solve_constant,
    sparse_grid,
)

__all__ = [
    "NpbeError",
    "__version__",
    "contraction_bound",
    "predict_error",
    "shoot",
    "small_data_bounds",
    "solve_constant",
    "sparse_grid",
]
