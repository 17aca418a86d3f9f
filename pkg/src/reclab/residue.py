"""Finite fields F_{p^d} in a polynomial basis.

Polynomials over F_p are lists of ints, lowest degree first.  Fields here
are tiny (at most 3^9 elements), so clarity wins over speed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

from .errors import ConstructionFailed, NoSolution
from .linalg import kernel_mod_p


def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def poly_mod(a: Sequence[int], m: Sequence[int], p: int) -> list[int]:
    a = _trim([x % p for x in a])
    m = _trim([x % p for x in m])
    inv = pow(m[-1], -1, p)
    dm = len(m) - 1
    while len(a) - 1 >= dm:
        f = a[-1] * inv % p
        shift = len(a) - 1 - dm
        for i, c in enumerate(m):
            a[shift + i] = (a[shift + i] - f * c) % p
        _trim(a)
    return a


def poly_mul(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim([c % p for c in out])


def poly_sub(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    n = max(len(a), len(b))
    a = list(a) + [0] * (n - len(a))
    b = list(b) + [0] * (n - len(b))
    return _trim([(x - y) % p for x, y in zip(a, b)])


def poly_powmod(a: Sequence[int], e: int, m: Sequence[int], p: int) -> list[int]:
    result = [1]
    base = poly_mod(a, m, p)
    while e:
        if e & 1:
            result = poly_mod(poly_mul(result, base, p), m, p)
        base = poly_mod(poly_mul(base, base, p), m, p)
        e >>= 1
    return result


def poly_gcd(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    a = _trim([x % p for x in a])
    b = _trim([x % p for x in b])
    while b:
        a, b = b, poly_mod(a, b, p)
    if a:
        inv = pow(a[-1], -1, p)
        a = [x * inv % p for x in a]
    return a


def is_irreducible(poly: Sequence[int], p: int) -> bool:
    """Distinct-degree test: gcd(f, x^{p^k} - x) = 1 for k <= deg/2."""
    f = _trim([x % p for x in poly])
    d = len(f) - 1
    if d < 1:
        raise ValueError("polynomial must have degree >= 1")
    if d == 1:
        return True
    xp = [0, 1]
    for _ in range(d // 2):
        xp = poly_powmod(xp, p, f, p)
        if len(poly_gcd(f, poly_sub(xp, [0, 1], p), p)) > 1:
            return False
    # x^{p^d} = x mod f is needed too, otherwise f could be a power of a factor
    xpd = xp
    for _ in range(d - d // 2):
        xpd = poly_powmod(xpd, p, f, p)
    return poly_sub(xpd, [0, 1], p) == []


class ResidueField:
    """F_p[x]/(modulus) with ``modulus`` monic and irreducible."""

    def __init__(self, p: int, modulus: Sequence[int]):
        modulus = [int(c) % p for c in modulus]
        if not modulus or modulus[-1] != 1:
            raise ValueError("modulus must be monic (lowest degree first)")
        if not is_irreducible(modulus, p):
            raise ConstructionFailed(f"modulus {modulus} is reducible over F_{p}")
        self.p = p
        self.modulus = tuple(modulus)
        self.degree = len(modulus) - 1

    def __eq__(self, other):
        return isinstance(other, ResidueField) and (self.p, self.modulus) == (other.p, other.modulus)

    def __hash__(self):
        return hash((self.p, self.modulus))

    def __repr__(self):
        return f"ResidueField(p={self.p}, modulus={list(self.modulus)})"

    @property
    def size(self) -> int:
        return self.p**self.degree

    def __call__(self, coeffs) -> "ResidueElement":
        if isinstance(coeffs, int):
            coeffs = [coeffs]
        c = poly_mod(list(coeffs), self.modulus, self.p)
        return ResidueElement(self, tuple(c + [0] * (self.degree - len(c))))

    def zero(self) -> "ResidueElement":
        return self(0)

    def one(self) -> "ResidueElement":
        return self(1)

    def gen(self) -> "ResidueElement":
        return self([0, 1])

    def basis(self) -> list["ResidueElement"]:
        return [self([0] * i + [1]) for i in range(self.degree)]

    def elements(self):
        """Every element, in lexicographic coefficient order."""
        import itertools

        for coeffs in itertools.product(range(self.p), repeat=self.degree):
            yield ResidueElement(self, coeffs[::-1])

    def random_element(self, rng: random.Random) -> "ResidueElement":
        return ResidueElement(self, tuple(rng.randrange(self.p) for _ in range(self.degree)))

    @cached_property
    def trace_vector(self) -> tuple[int, ...]:
        """Tr(x^i) for each basis monomial; the trace is the dot product."""
        return tuple(_trace_by_frobenius(b) for b in self.basis())

    def frobenius_matrix(self) -> list[list[int]]:
        """Columns are frobenius(x^i) in the polynomial basis."""
        cols = [frobenius(b).coeffs for b in self.basis()]
        return [[cols[j][i] for j in range(self.degree)] for i in range(self.degree)]


@dataclass(frozen=True)
class ResidueElement:
    field: ResidueField
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if len(self.coeffs) != self.field.degree:
            raise ValueError("coefficient length must equal the field degree")

    def _other(self, other) -> "ResidueElement":
        if isinstance(other, int):
            return self.field(other)
        if other.field != self.field:
            raise ValueError("elements of different fields")
        return other

    def __add__(self, other):
        other = self._other(other)
        p = self.field.p
        return ResidueElement(self.field, tuple((a + b) % p for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        p = self.field.p
        return ResidueElement(self.field, tuple(-a % p for a in self.coeffs))

    def __sub__(self, other):
        return self + (-self._other(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._other(other)
        f = self.field
        return f(poly_mul(self.coeffs, other.coeffs, f.p))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        f = self.field
        if e < 0:
            return self.inverse() ** (-e)
        return f(poly_powmod(self.coeffs, e, f.modulus, f.p))

    def inverse(self) -> "ResidueElement":
        if self.is_zero():
            raise ZeroDivisionError("zero has no inverse")
        return self ** (self.field.size - 2)

    def __truediv__(self, other):
        return self * self._other(other).inverse()

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __bool__(self):
        return not self.is_zero()

    def __repr__(self):
        terms = [f"{c}*t^{i}" if i else str(c) for i, c in enumerate(self.coeffs) if c]
        return " + ".join(terms) or "0"

    def to_prime(self) -> int:
        """The element as an integer, if it lies in F_p."""
        if any(self.coeffs[1:]):
            raise ValueError(f"{self!r} is not in the prime field")
        return self.coeffs[0]


def frobenius(a: ResidueElement) -> ResidueElement:
    return a ** a.field.p


def _trace_by_frobenius(a: ResidueElement) -> int:
    acc, t = a, a
    for _ in range(a.field.degree - 1):
        t = frobenius(t)
        acc = acc + t
    return acc.to_prime()


def trace_to_prime(a: ResidueElement) -> int:
    p = a.field.p
    return sum(c * t for c, t in zip(a.coeffs, a.field.trace_vector)) % p


def norm_to_prime(a: ResidueElement) -> int:
    f = a.field
    return (a ** ((f.size - 1) // (f.p - 1))).to_prime()


def selfdual_normal_basis(p: int) -> tuple[ResidueField, ResidueElement]:
    """F_{p^p} = F_p[x]/(x^p - x^{p-1} + 1) and the class tau of x.

    The conjugates of tau form a self-dual normal basis with Tr(tau) = 1.
    (x^p - x^{p-1} - 1 would not do: 2 is always a root of it.)  The duality
    relations are checked here, not taken on trust.
    """
    modulus = [1] + [0] * (p - 2) + [-1 % p, 1]
    field = ResidueField(p, modulus)
    tau = field.gen()
    conj = [tau]
    for _ in range(p - 1):
        conj.append(frobenius(conj[-1]))
    for k in range(p):
        for j in range(p):
            if trace_to_prime(conj[k] * conj[j]) != int(k == j):
                raise ConstructionFailed(f"x^{p} - x^{p - 1} - 1 does not give a self-dual basis (k={k}, j={j})")
    return field, tau


def find_irreducible(p: int, d: int, rng: random.Random) -> list[int]:
    """Random monic irreducible polynomial of degree ``d`` over F_p."""
    for _ in range(100 * d * p):
        cand = [rng.randrange(p) for _ in range(d)] + [1]
        if cand[0] and is_irreducible(cand, p):
            return cand
    raise ConstructionFailed(f"no irreducible polynomial of degree {d} found")


def trace_one_element(field: ResidueField) -> ResidueElement:
    """An element of trace 1, from one linear equation in the basis."""
    p = field.p
    for i, t in enumerate(field.trace_vector):
        if t % p:
            coeffs = [0] * field.degree
            coeffs[i] = pow(t, -1, p)
            return ResidueElement(field, tuple(coeffs))
    raise ConstructionFailed("trace map is identically zero")


def _affine_matrix(alpha: ResidueElement) -> list[list[int]]:
    field = alpha.field
    cols = [(frobenius(b) + alpha * b).coeffs for b in field.basis()]
    return [[cols[j][i] for j in range(field.degree)] for i in range(field.degree)]


def frobenius_affine_kernel(alpha: ResidueElement) -> list[ResidueElement]:
    """F_p-basis of {c : c^p + alpha c = 0}."""
    field = alpha.field
    return [ResidueElement(field, tuple(v)) for v in kernel_mod_p(_affine_matrix(alpha), field.p)]


def solve_frobenius_affine(alpha: ResidueElement, beta: ResidueElement) -> ResidueElement:
    """One solution c of c^p + alpha*c = beta; the map is F_p-linear in c."""
    field = alpha.field
    if beta.field != field:
        raise ValueError("alpha and beta must share a field")
    p, d = field.p, field.degree
    A = _affine_matrix(alpha)
    # augmented system solved by plain Gauss-Jordan over F_p
    M = [A[i] + [beta.coeffs[i]] for i in range(d)]
    pivots = []
    r = 0
    for c in range(d):
        pr = next((i for i in range(r, d) if M[i][c] % p), None)
        if pr is None:
            continue
        M[r], M[pr] = M[pr], M[r]
        inv = pow(M[r][c], -1, p)
        M[r] = [x * inv % p for x in M[r]]
        for i in range(d):
            if i != r and M[i][c]:
                f = M[i][c]
                M[i] = [(a - f * b) % p for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
    if any(M[i][d] % p for i in range(r, d)):
        raise NoSolution("beta is not in the image of c -> c^p + alpha c")
    sol = [0] * d
    for i, c in enumerate(pivots):
        sol[c] = M[i][d]
    return ResidueElement(field, tuple(sol))
