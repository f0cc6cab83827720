"""Generalized variation functionals and (C, alpha) summability of multiple Fourier series."""

__version__ = "0.1.0"

from .gridfn import GridFunction, make_catalog, parse_function, quadrant_limits  # noqa: E402
from .lambda_seq import LambdaSeq, make_lambda, parse_lambda, series_condition_probe, validate_lambda  # noqa: E402
from .summability import (  # noqa: E402
    CesaroParams,
    cesaro_coefficients,
    cesaro_mean,
    fourier_coefficients,
    pringsheim_diagnostic,
    rectangular_partial_sum,
)
from .variation import (  # noqa: E402
    axis_lambda_variation,
    composite_variation,
    mixed_lambda_variation,
    modulus_of_variation,
    optimal_pairing_value,
    phi_variation,
    star_variation,
    tail_continuity_probe,
)

__all__ = [
    "GridFunction",
    "LambdaSeq",
    "CesaroParams",
    "make_catalog",
    "parse_function",
    "quadrant_limits",
    "make_lambda",
    "parse_lambda",
    "validate_lambda",
    "series_condition_probe",
    "fourier_coefficients",
    "rectangular_partial_sum",
    "cesaro_coefficients",
    "cesaro_mean",
    "pringsheim_diagnostic",
    "optimal_pairing_value",
    "axis_lambda_variation",
    "mixed_lambda_variation",
    "composite_variation",
    "star_variation",
    "phi_variation",
    "modulus_of_variation",
    "tail_continuity_probe",
]
