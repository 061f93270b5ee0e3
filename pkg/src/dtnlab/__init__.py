"""Discrete spectral boundary data and Dirichlet-to-Neumann maps for Schrödinger operators on grids."""

__version__ = "0.1.0"

from .assembly import (
    BlockOperator,
    IllConditionedError,
    NumericalError,
    Potential,
    PotentialError,
    SingularSystemError,
    apply_dirichlet_solve,
    assemble,
    factorize,
)
from .dtn import (
    DtnMatrix,
    difference_decomposition,
    dtn_difference,
    dtn_direct,
    dtn_series,
    operator_norm,
    resolvent_remainder,
    resolvent_shift_series,
    solve_bvp_series,
)
from .eigen import EigenSystem, group_degeneracies, solve_eigensystem, weyl_fit
from .grid import Grid, GridError, Metric, build_grid, compute_weights, conformal_metric, euclidean_metric
from .spectral import (
    SpectralBoundaryData,
    align_gauge,
    boundary_flux,
    distance,
    growth_diagnostics,
    interpolation_gap,
    spectral_sobolev_norm,
    weights_alpha_beta,
)

__all__ = [name for name in dir() if not name.startswith("_")]
