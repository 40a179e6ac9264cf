"""Spectral and nuclear norm estimates and bounds for real third-order tensors."""

from .bounds import (
    BoundsReport,
    build_report,
    lower_slice,
    nuclear_bounds,
    nuclear_upper_estimate,
    sandwich,
    upper_flatten,
    upper_gram,
)
from .config import RunConfig
from .core import (
    Biquadratic,
    RectMatrix,
    SymMatrix,
    Tensor3,
    contract,
    example_1,
    flatten_biquadratic,
    gram,
    inner,
    multilinear_form,
    rank_one,
    slice_matrices,
    unfold,
)
from .eig import matrix_nuclear, matrix_nuclear_rect, spectral_radius, sym_eig
from .msolve import hopm, largest_m_eigenvalue, m_power_iteration, spectral_norm
from .oracle import grid_oracle_2x2, multistart_oracle

__version__ = "0.1.0"

__all__ = [
    "Biquadratic",
    "BoundsReport",
    "RectMatrix",
    "RunConfig",
    "SymMatrix",
    "Tensor3",
    "build_report",
    "contract",
    "example_1",
    "flatten_biquadratic",
    "gram",
    "grid_oracle_2x2",
    "hopm",
    "inner",
    "largest_m_eigenvalue",
    "lower_slice",
    "m_power_iteration",
    "matrix_nuclear",
    "matrix_nuclear_rect",
    "multilinear_form",
    "multistart_oracle",
    "nuclear_bounds",
    "nuclear_upper_estimate",
    "rank_one",
    "sandwich",
    "slice_matrices",
    "spectral_norm",
    "spectral_radius",
    "sym_eig",
    "unfold",
    "upper_flatten",
    "upper_gram",
]
