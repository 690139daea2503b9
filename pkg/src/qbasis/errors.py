"""Exception types shared across the package.

Every error raised by qbasis derives from QBasisError, so callers can
catch one type at the CLI boundary.  Errors that carry a witness (an
index, a position) expose it as an attribute.
"""

from __future__ import annotations


class QBasisError(Exception):
    """Base class for all qbasis errors."""


class VarTableMismatch(QBasisError):
    """Two values from different variable tables were combined."""


class ExactDivisionError(QBasisError):
    """A division that must be exact left a remainder."""


class SingularEvaluation(QBasisError):
    """A rational function was evaluated at an index killing its denominator."""

    def __init__(self, index: int, message: str | None = None):
        self.index = index
        super().__init__(message or f"denominator vanishes at index {index}")


class NotCompatible(QBasisError):
    """No compatibility of the requested shape exists within the search cap."""


class NotTriangular(QBasisError):
    """Basis expansion requires strictly increasing leading indices."""


class InconsistentExpansion(QBasisError):
    """Sequence values contradict the requested basis expansion."""

    def __init__(self, index: int, message: str | None = None):
        self.index = index
        super().__init__(message or f"expansion inconsistent at n={index}")


class InsufficientTerms(QBasisError):
    """Not enough sequence values were supplied."""

    def __init__(self, needed: int, message: str | None = None):
        self.needed = needed
        super().__init__(message or f"need at least {needed} sequence values")


class MissingInitial(QBasisError):
    """Unrolling hit a singular index without an explicit initial value."""

    def __init__(self, index: int):
        self.index = index
        super().__init__(f"leading coefficient vanishes; initial value for index {index} required")


class BudgetExceeded(QBasisError):
    """A search (guessing, elimination, lclm) exceeded its configured budget."""


class ParseError(QBasisError):
    """Input text does not conform to the expression grammar."""

    def __init__(self, message: str, position: int):
        self.position = position
        super().__init__(f"{message} (at position {position})")
