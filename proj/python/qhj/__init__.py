"""Quantum Hamilton-Jacobi workbench: propagators, complex phases and operator algebra."""

from ._core import (
    Potential,
    SpatialGrid,
    TimeGrid,
    analytic_slab,
    config_hash,
    evolve_split_operator,
    extract_phase,
    inverse_wo,
    kernel_free,
    kernel_harmonic,
    matrix_element,
    qhje_residual,
    smallt_derivation,
    wellorder,
)

__all__ = [
    "Potential",
    "SpatialGrid",
    "TimeGrid",
    "analytic_slab",
    "config_hash",
    "evolve_split_operator",
    "extract_phase",
    "inverse_wo",
    "kernel_free",
    "kernel_harmonic",
    "matrix_element",
    "qhje_residual",
    "smallt_derivation",
    "wellorder",
]
