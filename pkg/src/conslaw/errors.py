"""Exception classes.

``MethodInapplicable`` and its subclasses mark inputs a flux method cannot
handle (CLI exit code 4); ``VerificationError`` marks a failed identity check
(exit code 5).
"""
from __future__ import annotations


class ConslawError(Exception):
    pass


class ExpressionError(ConslawError, ValueError):
    """Malformed expression operation (non-monomial divisor, nested functions, ...)."""


class NonMonomialDivisor(ExpressionError):
    pass


class NestedFunctionError(ExpressionError):
    pass


class UndeclaredSymbol(ExpressionError):
    pass


class ReductionLimitExceeded(ConslawError):
    def __init__(self, message: str, chain: list[str] | None = None):
        super().__init__(message)
        self.chain = chain or []


class ParseError(ConslawError, ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        where = ""
        if line is not None:
            where = f" (line {line})" if column is None else f" (line {line}, column {column})"
        super().__init__(message + where)
        self.line = line
        self.column = column


class ProblemError(ConslawError, ValueError):
    """Schema or validation failure in a problem document."""

    def __init__(self, message: str, violations: list[str] | None = None):
        super().__init__(message)
        self.violations = violations or []


class EmptyAnsatz(ConslawError, ValueError):
    pass


class NonlinearUnknowns(ConslawError, ValueError):
    pass


class MethodInapplicable(ConslawError):
    code = "method-inapplicable"


class NonvanishingAtZero(MethodInapplicable):
    code = "nonvanishing-at-zero"


class DivergentIntegral(MethodInapplicable):
    code = "divergent-integral"


class ArbitraryFunctionPresent(MethodInapplicable):
    code = "arbitrary-function"


class NonPolynomialLambda(MethodInapplicable):
    code = "non-polynomial-lambda"


class NonHomogeneous(MethodInapplicable):
    code = "non-homogeneous"

    def __init__(self, message: str, terms: tuple = ()):
        super().__init__(message)
        self.terms = terms


class CriticalConservationLaw(MethodInapplicable):
    code = "critical"


class UnsupportedBasePoint(MethodInapplicable):
    code = "unsupported-base-point"


class NoFluxInAnsatz(MethodInapplicable):
    code = "no-flux-in-ansatz"

    def __init__(self, message: str, residual=None):
        super().__init__(message)
        self.residual = residual


class VerificationError(ConslawError):
    code = "verification-failure"

    def __init__(self, message: str, residual=None):
        super().__init__(message)
        self.residual = residual
