"""Exact arithmetic over F_p and Z_p / p^K, square classes and Hilbert symbols.

Everything here works on plain Python integers (and ``fractions.Fraction``
where rationals are accepted). A p-adic integer is modelled by its residue
modulo p^K together with its valuation; see :class:`PadicApprox`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Union

from .errors import (
    InfiniteValuation,
    NotAUnit,
    NotPrimeError,
    PrecisionExhausted,
    UnsupportedPrime,
    ZeroInput,
)

Rational = Union[int, Fraction]

DEFAULT_PRECISION = 32

# Deterministic for n < 3.3e24, which covers every p < 2^64.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


@lru_cache(maxsize=4096)
def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def check_prime(p: int) -> int:
    if not isinstance(p, int) or not is_prime(p):
        raise NotPrimeError(f"{p!r} is not prime")
    return p


def valuation(a: int, p: int) -> int:
    """Return v_p(a). Raises InfiniteValuation for a = 0."""
    if a == 0:
        raise InfiniteValuation("valuation of 0 is infinite")
    a = abs(a)
    e = 0
    while a % p == 0:
        a //= p
        e += 1
    return e


def valuation_capped(a: int, p: int, cap: int) -> int:
    """v_p(a), but min(v_p(a), cap); 0 maps to cap."""
    if a == 0:
        return cap
    return min(valuation(a, p), cap)


def rational_valuation(a: Rational, p: int) -> int:
    a = Fraction(a)
    return valuation(a.numerator, p) - valuation(a.denominator, p)


def unit_part(a: int, p: int) -> tuple[int, int]:
    """Split a = p^e * u with p not dividing u."""
    e = valuation(a, p)
    return e, a // p**e


def inverse_mod_prime_power(a: int, p: int, K: int) -> int:
    if a % p == 0:
        raise NotAUnit(f"{a} is not a unit modulo {p}")
    return pow(a, -1, p**K)


def legendre(a: int, p: int) -> int:
    if p == 2:
        raise UnsupportedPrime("Legendre symbol needs an odd prime")
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


@dataclass(frozen=True)
class SquareClass:
    """Class of a nonzero rational in Q_p^* / (Q_p^*)^2.

    ``unit_class`` is +1 / -1 (residue / non-residue) for odd p and the unit
    part modulo 8 for p = 2.
    """

    p: int
    parity: int
    unit_class: int

    @property
    def is_square(self) -> bool:
        return self.parity == 0 and self.unit_class == 1


def _integer_representative(a: Rational) -> int:
    a = Fraction(a)
    if a == 0:
        raise ZeroInput("zero has no square class")
    # a = n/m lies in the class of n*m
    return a.numerator * a.denominator


def square_class(a: Rational, p: int) -> SquareClass:
    n = _integer_representative(a)
    e, u = unit_part(n, p)
    if p == 2:
        return SquareClass(2, e % 2, u % 8)
    return SquareClass(p, e % 2, legendre(u, p))


def is_square(a: Rational, p: int) -> bool:
    return square_class(a, p).is_square


def hilbert_symbol(a: Rational, b: Rational, p: int) -> int:
    """Hilbert symbol (a, b)_p by the closed formulas on square classes."""
    a = _integer_representative(a)
    b = _integer_representative(b)
    alpha, u = unit_part(a, p)
    beta, v = unit_part(b, p)
    if p == 2:
        eps = lambda t: ((t - 1) // 2) % 2  # noqa: E731
        omega = lambda t: ((t * t - 1) // 8) % 2  # noqa: E731
        u, v = u % 8, v % 8
        s = eps(u) * eps(v) + alpha * omega(v) + beta * omega(u)
        return -1 if s % 2 else 1
    sign = -1 if (alpha * beta * ((p - 1) // 2)) % 2 else 1
    if beta % 2:
        sign *= legendre(u, p)
    if alpha % 2:
        sign *= legendre(v, p)
    return sign


@dataclass(frozen=True)
class PadicContext:
    p: int
    K: int = DEFAULT_PRECISION

    def __post_init__(self):
        check_prime(self.p)
        if self.K < 1:
            raise ValueError("precision K must be positive")

    @property
    def modulus(self) -> int:
        return self.p**self.K

    def __call__(self, value: int) -> "PadicApprox":
        return PadicApprox.from_int(self, value)

    def check_precision(self, K: int) -> None:
        if K > self.K:
            raise PrecisionExhausted(f"requested precision {K} exceeds context bound {self.K}")


@dataclass(frozen=True)
class PadicApprox:
    """Element of Z_p known modulo p^K.

    ``valuation`` is None for the zero residue (valuation at least K, treated
    as infinite at this precision).
    """

    context: PadicContext
    residue: int
    valuation: int | None

    @classmethod
    def from_int(cls, ctx: PadicContext, value: int) -> "PadicApprox":
        r = value % ctx.modulus
        return cls(ctx, r, None if r == 0 else valuation(r, ctx.p))

    def _coerce(self, other) -> "PadicApprox":
        if isinstance(other, PadicApprox):
            if other.context != self.context:
                raise ValueError("mixing p-adic contexts")
            return other
        return PadicApprox.from_int(self.context, int(other))

    def __add__(self, other):
        return PadicApprox.from_int(self.context, self.residue + self._coerce(other).residue)

    __radd__ = __add__

    def __sub__(self, other):
        return PadicApprox.from_int(self.context, self.residue - self._coerce(other).residue)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        return PadicApprox.from_int(self.context, -self.residue)

    def __mul__(self, other):
        return PadicApprox.from_int(self.context, self.residue * self._coerce(other).residue)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        return PadicApprox(self.context, *_res_val(self.context, pow(self.residue, e, self.context.modulus)))

    def __eq__(self, other):
        if isinstance(other, (int, PadicApprox)):
            return self.residue == self._coerce(other).residue
        return NotImplemented

    def __hash__(self):
        return hash((self.context, self.residue))

    def __int__(self):
        return self.residue

    def is_unit(self) -> bool:
        return self.valuation == 0

    def inverse(self) -> "PadicApprox":
        if not self.is_unit():
            raise NotAUnit(f"{self.residue} is not a unit in Z_{self.context.p}")
        return PadicApprox.from_int(self.context, pow(self.residue, -1, self.context.modulus))

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def shift_down(self, e: int) -> "PadicApprox":
        """Exact division by p^e; the top e digits become unknown."""
        if e == 0:
            return self
        if self.valuation is not None and self.valuation < e:
            raise NotAUnit(f"{self.residue} is not divisible by p^{e}")
        if e >= self.context.K:
            raise PrecisionExhausted("division by p^e leaves no known digits")
        return PadicApprox.from_int(self.context, self.residue // self.context.p**e)

    def __repr__(self):
        return f"PadicApprox({self.residue} mod {self.context.p}^{self.context.K})"


def _res_val(ctx: PadicContext, r: int):
    return r, (None if r == 0 else valuation(r, ctx.p))
