"""Exception hierarchy shared by every lipdyn module."""

from __future__ import annotations


class LipdynError(Exception):
    """Base class for all library errors."""


class DSLError(LipdynError):
    """An error tied to a position in map-definition source text."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.message = message
        self.line = line
        self.column = column


class LexError(DSLError):
    pass


class ParseError(DSLError):
    def __init__(self, message: str, line: int, column: int, expected=()):
        self.expected = tuple(sorted(set(expected)))
        if self.expected:
            message = f"{message} (expected one of: {', '.join(self.expected)})"
        super().__init__(message, line, column)


class EvalError(LipdynError, ArithmeticError):
    pass


class UnknownFamily(LipdynError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class MissingParameter(LipdynError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class InsufficientSamples(LipdynError, ValueError):
    pass


class NoBracket(LipdynError):
    pass


class DegenerateNeighborhood(LipdynError, ValueError):
    pass


class NotAFixedPoint(LipdynError, ValueError):
    pass


class NotAPeriodicOrbit(LipdynError, ValueError):
    pass


class DerivativeUnavailable(LipdynError):
    pass


class NotAContraction(LipdynError):
    def __init__(self, message: str, iteration: int, quotient: float):
        super().__init__(message)
        self.iteration = iteration
        self.quotient = quotient


class MaxIterExceeded(LipdynError):
    pass


class BreakpointHit(LipdynError):
    def __init__(self, message: str, index: int, x: float):
        super().__init__(message)
        self.index = index
        self.x = x


class BreakpointOnCycle(LipdynError):
    pass


class OrbitEscaped(LipdynError):
    pass


class IoError(LipdynError, OSError):
    pass
