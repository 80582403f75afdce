"""Kernel density estimation of Y = X + eps from observations of X."""

from ._core import (
    BerksonError,
    asymptotic_bandwidth,
    catalog,
    default_grid,
    diagonal_qp,
    estimate,
    exact_mise,
    fourier_mise,
    ise_decomposition,
    monte_carlo_ise,
    optimal_bandwidth,
    ratio_table,
    rule_of_thumb_hy,
    sample,
    silverman_hx,
)

__all__ = [
    "BerksonError",
    "asymptotic_bandwidth",
    "catalog",
    "default_grid",
    "diagonal_qp",
    "estimate",
    "exact_mise",
    "fourier_mise",
    "ise_decomposition",
    "monte_carlo_ise",
    "optimal_bandwidth",
    "ratio_table",
    "rule_of_thumb_hy",
    "sample",
    "silverman_hx",
]
__version__ = "0.1.0"
