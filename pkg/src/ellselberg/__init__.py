"""Elliptic hypergeometric functions and numerical checks of elliptic Selberg identities at t = q."""

from .core import (
    GammaFactors,
    Nome,
    dedekind_constant,
    elliptic_gamma,
    gamma_factors,
    pm_product,
    reciprocal_gamma,
    shifted_factorial,
    theta,
)
from .errors import (
    EllipticDomainError,
    EllipticError,
    NearPoleError,
    QuadratureError,
    SamplingError,
    TruncationError,
)

__version__ = "0.1.0"

__all__ = [
    "Nome",
    "GammaFactors",
    "theta",
    "elliptic_gamma",
    "reciprocal_gamma",
    "gamma_factors",
    "shifted_factorial",
    "dedekind_constant",
    "pm_product",
    "EllipticError",
    "EllipticDomainError",
    "NearPoleError",
    "QuadratureError",
    "SamplingError",
    "TruncationError",
]
