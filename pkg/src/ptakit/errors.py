"""Exception types shared across the toolkit."""

from __future__ import annotations


class PTAError(Exception):
    """Base class for every error raised by ptakit."""


class ShapeError(PTAError, ValueError):
    pass


class SkewValidationError(PTAError, ValueError):
    """Raised when a matrix is not skew-symmetric within tolerance."""

    def __init__(self, message: str, max_residual: float | None = None):
        super().__init__(message)
        self.max_residual = max_residual


class MatrixConstructionError(PTAError, ValueError):
    """Raised when an evaluator produces an unusable value for some pair."""

    def __init__(self, message: str, pair: tuple[int, int] | None = None):
        super().__init__(message)
        self.pair = pair


class NumericError(PTAError, ArithmeticError):
    """Non-convergence of an eigenroutine, optimizer, or quadrature."""


class EnumerationLimitError(PTAError):
    """Raised when exhaustive enumeration would exceed the configured limit."""


class DisconnectedGraphError(PTAError, ValueError):
    """Raised when a comparison graph splits into several components."""

    def __init__(self, components: list[list[str]]):
        shown = "; ".join("{" + ", ".join(c) + "}" for c in components)
        super().__init__(f"comparison graph has {len(components)} components: {shown}")
        self.components = components


class ParseError(PTAError, ValueError):
    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
