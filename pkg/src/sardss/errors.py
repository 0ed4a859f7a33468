"""Shared exception types."""
from __future__ import annotations


class EngineError(Exception):
    """Base class for all library errors."""


class ValidationError(EngineError):
    """Raised when a domain value violates its invariants.

    Carries the individual violations so callers can report them all at once.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations) or "validation failed")


class ConvergenceError(EngineError):
    """Power iteration failed to converge within the iteration budget."""


class AlignmentError(EngineError):
    """Labels or dimensions of two values do not line up."""


class DocumentError(EngineError):
    """A scenario document failed to parse or validate.

    ``errors`` is a list of (path, message) pairs locating every problem found.
    """

    def __init__(self, errors):
        self.errors = list(errors)
        lines = "; ".join(f"{path}: {msg}" for path, msg in self.errors)
        super().__init__(lines or "invalid document")
