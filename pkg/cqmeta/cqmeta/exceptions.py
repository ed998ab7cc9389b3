"""
Error hierarchy shared by the library and the command line front end.
"""

from typing import Optional


class CqMetaError(Exception):
    """Base class for every error raised by cqmeta."""


class InvariantViolation(CqMetaError, ValueError):
    """A value does not satisfy the invariants of its type."""


class DimensionMismatch(CqMetaError, ValueError):
    """Operands have incompatible dimensions or lengths."""


class ParameterError(CqMetaError, ValueError):
    """A scalar parameter lies outside its admissible range."""


class DescriptorError(CqMetaError, ValueError):
    """A JSON descriptor could not be parsed or is malformed."""

    def __init__(self, message: str, path: Optional[str] = None, line: Optional[int] = None):
        self.path = path
        self.line = line
        location = ""
        if path is not None:
            location = f"{path}"
            if line is not None:
                location += f":{line}"
            location += ": "
        super().__init__(f"{location}{message}")


class ConvergenceError(CqMetaError, RuntimeError):
    """An iterative computation stopped before reaching its tolerance."""


class PartitionUnavailable(CqMetaError, RuntimeError):
    """No common residual eigenbasis exists for the code at its packing radius."""


class SymmetryError(CqMetaError, ValueError):
    """Functionals that must agree across codewords do not."""
