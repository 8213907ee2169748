"""Atomic de-excitation in sub-vacuum cavity fields, beyond the rotating-wave approximation."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    DegenerateWindowError,
    DimensionError,
    DomainError,
    InputError,
    NumericalValidityError,
    SubvacError,
    TruncationError,
    TruncationLeakageError,
)
