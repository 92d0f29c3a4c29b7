"""Exceptions raised by phaselip.

Each error also derives from the closest builtin exception, so callers
may catch either the specific class or, e.g., :class:`ValueError`.
"""


class PhaseLipError(Exception):
    """Base class for all phaselip errors."""


class DimensionError(PhaseLipError, ValueError):
    """Vectors or frames of different truncation dimension were combined."""


class FieldError(PhaseLipError, ValueError):
    """Real and complex objects were combined."""


class RangeError(PhaseLipError, ValueError):
    """An index or depth lies outside the truncation."""


class DegenerateError(PhaseLipError, ValueError):
    """An operation needs a nonzero (or independent) input."""


class EmptyFrameError(PhaseLipError, ValueError):
    """A frame without any vectors."""


class RankError(PhaseLipError, ValueError):
    """A family does not span its space."""


class NumericalError(PhaseLipError, ArithmeticError):
    """Non-finite values or a failed eigensolver."""


class ConstraintError(PhaseLipError, ValueError):
    """Sequence parameters violate a construction's inequalities."""


class SpecError(PhaseLipError, ValueError):
    """Inputs do not satisfy a construction or experiment precondition."""


class FlatnessError(PhaseLipError, ValueError):
    """A frame failed the sampled flatness certification."""


class SearchError(PhaseLipError, RuntimeError):
    """A search finished without producing any valid pair."""


class FitError(PhaseLipError, ValueError):
    """Too few usable records for a fit or check."""


class UsageError(PhaseLipError, ValueError):
    """Invalid command-line usage."""
