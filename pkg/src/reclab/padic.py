"""Fixed-precision p-adic integers, i.e. residues in Z/p^N.

Precision belongs to the value.  It only drops through exact division by a
power of p; no operation silently renormalizes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .errors import NotAUnit, NotDivisible, PrimeMismatch, UnsupportedPrime


class _AtLeast(int):
    """Valuation of a value that is zero at its precision (``>=N``)."""

    def __repr__(self) -> str:
        return f">={int(self)}"

    __str__ = __repr__


def at_least(n: int) -> _AtLeast:
    return _AtLeast(n)


def is_exhausted(v) -> bool:
    """True if ``v`` is a valuation that ran into the precision cap."""
    return isinstance(v, _AtLeast)


def val_int(n: int, p: int, cap: int) -> int:
    """p-adic valuation of an integer, capped at ``cap``."""
    if n == 0:
        return cap
    v = 0
    while v < cap and n % p == 0:
        n //= p
        v += 1
    return v


def _check_prime(p: int) -> None:
    if p < 3 or p % 2 == 0 or any(p % d == 0 for d in range(3, int(p**0.5) + 1, 2)):
        raise UnsupportedPrime(f"odd prime required, got {p}")


@dataclass(frozen=True)
class PAdicScalar:
    prime: int
    precision: int
    value: int

    def __post_init__(self):
        _check_prime(self.prime)
        if self.precision < 0:
            raise ValueError("precision must be non-negative")
        object.__setattr__(self, "value", self.value % self.modulus)

    @property
    def modulus(self) -> int:
        return self.prime**self.precision

    @classmethod
    def of(cls, p: int, n: int, value: int) -> "PAdicScalar":
        return cls(p, n, value)

    def _coerce(self, other) -> "PAdicScalar":
        if isinstance(other, PAdicScalar):
            if other.prime != self.prime:
                raise PrimeMismatch(f"{self.prime} vs {other.prime}")
            return other
        if isinstance(other, int):
            return PAdicScalar(self.prime, self.precision, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return PAdicScalar(self.prime, min(self.precision, other.precision), self.value + other.value)

    __radd__ = __add__

    def __neg__(self):
        return PAdicScalar(self.prime, self.precision, -self.value)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return PAdicScalar(self.prime, min(self.precision, other.precision), self.value - other.value)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return PAdicScalar(self.prime, min(self.precision, other.precision), self.value * other.value)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return inv_unit(self) ** (-e)
        return PAdicScalar(self.prime, self.precision, pow(self.value, e, self.modulus))

    def __eq__(self, other):
        if isinstance(other, int):
            other = PAdicScalar(self.prime, self.precision, other)
        if not isinstance(other, PAdicScalar) or other.prime != self.prime:
            return NotImplemented
        n = min(self.precision, other.precision)
        return (self.value - other.value) % self.prime**n == 0

    def __hash__(self):
        return hash((self.prime, self.precision, self.value))

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"{self.value} + O({self.prime}^{self.precision})"

    def is_zero(self) -> bool:
        return self.value == 0

    def lift(self, precision: int) -> "PAdicScalar":
        """Same integer representative, read at a higher precision."""
        return PAdicScalar(self.prime, precision, self.value)

    def reduce(self, precision: int) -> "PAdicScalar":
        return PAdicScalar(self.prime, min(precision, self.precision), self.value)

    def centered(self) -> int:
        """Representative in (-p^N/2, p^N/2]."""
        m = self.modulus
        return self.value - m if self.value > m // 2 else self.value


Valuation = Union[int, _AtLeast]


def val_p(a: PAdicScalar) -> Valuation:
    if a.value == 0:
        return at_least(a.precision)
    return val_int(a.value, a.prime, a.precision)


def inv_unit(a: PAdicScalar) -> PAdicScalar:
    if a.value % a.prime == 0:
        raise NotAUnit(f"{a!r} is not a unit")
    return PAdicScalar(a.prime, a.precision, pow(a.value, -1, a.modulus))


def div_exact_p(a: PAdicScalar, k: int) -> PAdicScalar:
    if k < 0:
        raise ValueError("k must be non-negative")
    if k > a.precision or a.value % a.prime**k:
        raise NotDivisible(f"{a!r} is not divisible by {a.prime}^{k}")
    return PAdicScalar(a.prime, a.precision - k, a.value // a.prime**k)
