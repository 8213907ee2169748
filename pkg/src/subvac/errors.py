"""Exception hierarchy shared by all modules."""


class SubvacError(Exception):
    """Base class for every error raised by this package."""


class InputError(SubvacError, ValueError):
    """An argument violates a documented precondition."""


class DimensionError(InputError):
    """Fock-space index or truncation size out of range."""


class DomainError(InputError):
    """A physical argument lies outside its admissible domain."""


class NumericalValidityError(SubvacError, ArithmeticError):
    """A computation cannot deliver a trustworthy result."""


class TruncationError(NumericalValidityError):
    """The truncated Fock expansion loses too much norm."""

    def __init__(self, message, required_dim=None):
        super().__init__(message)
        self.required_dim = required_dim


class TruncationLeakageError(NumericalValidityError):
    """Exact evolution pushed population into the top Fock levels."""


class DegenerateWindowError(NumericalValidityError):
    """The vacuum reference amplitude vanishes for this window."""
