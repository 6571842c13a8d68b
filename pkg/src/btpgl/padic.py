"""Exact arithmetic in the rationals equipped with the p-adic valuation.

Scalars are plain :class:`fractions.Fraction` values, which Python already
keeps in lowest terms with a positive denominator, so every operation here is
bit-exact and needs no precision management.  The valuation of zero is a
distinguished sentinel that compares strictly above every integer.

Everything in this module is immutable after construction and safe to share
between threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import NegativeValuation

Scalar = Fraction


def int_val(n: int, p: int) -> int:
    """Exponent of p in a nonzero integer."""
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def is_prime(n: int) -> bool:
    """Trial-division primality test; intended for desk-scale primes."""
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


class _Infinity:
    """Valuation of zero.  Orders strictly above every integer."""

    __slots__ = ()

    def __repr__(self) -> str:
        return "+Infinity"

    def __eq__(self, other) -> bool:
        return isinstance(other, _Infinity)

    def __hash__(self) -> int:
        return hash("btpgl.padic.INFINITY")

    def __lt__(self, other) -> bool:
        return False

    def __le__(self, other) -> bool:
        return isinstance(other, _Infinity)

    def __gt__(self, other) -> bool:
        return not isinstance(other, _Infinity)

    def __ge__(self, other) -> bool:
        return True

    def __add__(self, other):
        return self

    __radd__ = __add__


INFINITY = _Infinity()


@dataclass(frozen=True)
class PAdicContext:
    """The prime p, fixing the valuation ring Z localized at p.

    The uniformizer is p itself and the residue field is F_p, so the residue
    cardinality q equals p.
    """

    p: int

    def __post_init__(self):
        if not isinstance(self.p, int) or not is_prime(self.p):
            raise ValueError(f"p must be a prime integer, got {self.p!r}")

    @property
    def q(self) -> int:
        """Cardinality of the residue field."""
        return self.p

    def val(self, x) -> int | _Infinity:
        """p-adic valuation of a rational; INFINITY for zero.

        Multiplicative: val(x*y) = val(x) + val(y).
        """
        x = Fraction(x)
        if x == 0:
            return INFINITY
        return int_val(x.numerator, self.p) - int_val(x.denominator, self.p)

    def is_integral(self, x) -> bool:
        """True when x lies in the valuation ring (val >= 0)."""
        return Fraction(x).denominator % self.p != 0

    def is_unit(self, x) -> bool:
        """True when x is a unit of the valuation ring (val == 0)."""
        x = Fraction(x)
        return x != 0 and x.numerator % self.p != 0 and x.denominator % self.p != 0

    def residue(self, x) -> int:
        """Image of a p-integral rational in F_p, as an integer in [0, p)."""
        x = Fraction(x)
        if x.denominator % self.p == 0:
            raise NegativeValuation(f"{x} is not {self.p}-integral")
        return x.numerator * pow(x.denominator, -1, self.p) % self.p

    def residue_mod_power(self, x, e: int) -> int:
        """Canonical representative of a p-integral rational in Z/p^e.

        For e = 1 this agrees with :meth:`residue`.
        """
        if e < 1:
            raise ValueError(f"exponent must be positive, got {e}")
        x = Fraction(x)
        if x.denominator % self.p == 0:
            raise NegativeValuation(f"{x} is not {self.p}-integral")
        m = self.p**e
        return x.numerator * pow(x.denominator, -1, m) % m

    def unit_part(self, x) -> Fraction:
        """x divided by p^val(x); raises on zero."""
        x = Fraction(x)
        if x == 0:
            raise ZeroDivisionError("zero has no unit part")
        v = self.val(x)
        return x / Fraction(self.p) ** v
