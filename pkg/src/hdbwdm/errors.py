"""Exception types shared across the package.

``ValueError`` is raised for plain contract violations (bad shapes, bad
parameter ranges).  The two classes below mark conditions that callers may
want to distinguish: unusable input data versus a computation that could
not be completed.
"""

from __future__ import annotations

__all__ = ["HdbwdmError", "DataError", "NumericalError"]


class HdbwdmError(Exception):
    """Base class for package-specific errors."""


class DataError(HdbwdmError):
    """Input data cannot be used (unparseable file, missing labels, ...)."""


class NumericalError(HdbwdmError):
    """A computation failed (all restarts diverged, degenerate cell, ...)."""
