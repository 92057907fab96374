"""Python access to the fhl field and flow library."""

from ._fhl import (
    CascadeLevel,
    CascadeReport,
    ConfigError,
    Error,
    Grid,
    HypothesisError,
    bilinear_B,
    carre_du_champ_residual,
    fit_alpha,
    frac_laplacian_quadrature,
    frac_laplacian_spectral,
    oscillation_cascade,
    run_fractional,
    run_local,
)

__all__ = [
    "CascadeLevel",
    "CascadeReport",
    "ConfigError",
    "Error",
    "Grid",
    "HypothesisError",
    "bilinear_B",
    "carre_du_champ_residual",
    "fit_alpha",
    "frac_laplacian_quadrature",
    "frac_laplacian_spectral",
    "oscillation_cascade",
    "run_fractional",
    "run_local",
]
