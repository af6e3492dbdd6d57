"""Exception hierarchy shared by all evpos modules."""
from typing import Optional


class EvPosError(Exception):
    """
    Base class of every error raised by evpos.

    :param message: Human readable description.
    :param module: The evpos module that raised the error.
    :param operation: The operation inside the module.
    """

    def __init__(self, message: str, *, module: Optional[str] = None, operation: Optional[str] = None) -> None:
        super().__init__(message)
        self.module = module
        self.operation = operation

    @property
    def origin(self) -> str:
        """Return "module.operation" for reports."""
        parts = [p for p in (self.module, self.operation) if p]
        return ".".join(parts) if parts else "evpos"


class DimensionError(EvPosError, ValueError):
    """Shapes do not fit: non-square matrix, mismatched vector, grid size."""


class DomainError(EvPosError, ValueError):
    """Input outside the mathematical domain: non-finite entries, negative time."""


class SpecError(EvPosError, ValueError):
    """Invalid operator or scenario specification."""


class PreconditionError(EvPosError, ValueError):
    """A hypothesis of an analysis does not hold for the given input."""


class IsolationError(PreconditionError):
    """A sweep window contains a further eigenvalue."""


class NumericalError(EvPosError, ArithmeticError):
    """
    A numerical routine failed.

    :param iterations: Iteration count or LAPACK info when the backend reports it.
    """

    def __init__(self, message: str, *, iterations: Optional[int] = None, **kwargs) -> None:
        super().__init__(message, **kwargs)
        self.iterations = iterations


class SingularityError(NumericalError):
    """
    The shifted matrix is singular up to tolerance.

    :param nearest_eigenvalue: The eigenvalue closest to the requested shift.
    """

    def __init__(self, message: str, *, nearest_eigenvalue: Optional[complex] = None, **kwargs) -> None:
        super().__init__(message, **kwargs)
        self.nearest_eigenvalue = nearest_eigenvalue


class ScaleError(NumericalError):
    """Over- or underflow of a sampled quantity."""


class HorizonError(NumericalError):
    """Nothing was found before the requested time horizon."""


class TruncationError(NumericalError):
    """A periodic box is too small for the evolved data."""


class NonPerronError(EvPosError, TypeError):
    """The leading eigenvalue is not real, so there is no Perron pair."""
