"""High-precision evaluation and identity checks for q-continued fractions and q-series."""

from .numerics import (
    BigReal,
    ConvergenceError,
    DomainError,
    PrecisionContext,
    PrecisionError,
    integrate,
    num_derivative,
)

__version__ = "0.1.0"

__all__ = [
    "BigReal",
    "ConvergenceError",
    "DomainError",
    "PrecisionContext",
    "PrecisionError",
    "integrate",
    "num_derivative",
]
