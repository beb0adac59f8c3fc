"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class PadicFormsError(Exception):
    """Base class for every error raised by this package."""


class NotPrimeError(PadicFormsError, ValueError):
    pass


class NotAUnit(PadicFormsError, ArithmeticError):
    pass


class UnsupportedPrime(PadicFormsError, ValueError):
    pass


class ZeroInput(PadicFormsError, ValueError):
    pass


class InfiniteValuation(PadicFormsError, ArithmeticError):
    """Raised when the valuation of 0 is requested as a number."""


class PrecisionExhausted(PadicFormsError, ArithmeticError):
    pass


class DimensionMismatch(PadicFormsError, ValueError):
    pass


class FormSyntaxError(PadicFormsError, SyntaxError):
    def __init__(self, message: str, text: str = "", position: int = 0):
        super().__init__(f"{message} at position {position}: {text!r}")
        self.position = position
        self.text = text


class InhomogeneousError(PadicFormsError, ValueError):
    def __init__(self, degrees):
        self.degrees = sorted(set(degrees))
        super().__init__(f"inhomogeneous input, monomial degrees {self.degrees}")


class UnknownName(PadicFormsError, KeyError):
    pass


class ZeroForm(PadicFormsError, ValueError):
    pass


class GuardExceeded(PadicFormsError, RuntimeError):
    pass


class EvenCharacteristic(PadicFormsError, ValueError):
    pass


class HypothesisFailed(PadicFormsError, ValueError):
    pass


class VerificationFailed(PadicFormsError, AssertionError):
    pass
