"""Arithmetic in O_L = Z_p[Pi]/(f) and O_M = O_L[u]/(g).

``f(T) = ((1+T)^p - 1)/T`` is the Eisenstein minimal polynomial of
``Pi = eta - 1`` with ``eta`` a primitive p-th root of unity, and ``g`` is a
monic lift of an irreducible residue polynomial of degree ``p^m``, so M/L is
unramified of degree ``p^m``.

Elements are stored as ``Pi^e * sum c[i, j] Pi^i u^j`` with ``0 <= i < p-1``,
``0 <= j < p^m`` and every ``c[i, j]`` an integer mod ``p^precision``.  The
valuation is normalized by ``v(Pi) = 1``, so ``v(p) = p - 1``.
"""

from __future__ import annotations

import random
from functools import cached_property
from math import comb
from typing import Union

import numpy as np

from .errors import (
    ConstructionFailed,
    NotAUnit,
    NotDivisible,
    NotInBaseField,
    ParamsMismatch,
    PrecisionTooLow,
    UnsupportedPrime,
)
from .padic import PAdicScalar, at_least, is_exhausted, val_int
from .residue import ResidueElement, ResidueField, find_irreducible, selfdual_normal_basis

SUPPORTED_PRIMES = (3, 5, 7)


def _zeros(shape) -> np.ndarray:
    return np.zeros(shape, dtype=object)


class TowerParams:
    """The tower Q_p - L - M at nominal precision ``N``.

    ``capacity`` is the largest precision any element may carry; it leaves
    room for the guard digits used by series and exact divisions.
    """

    def __init__(self, p: int, m: int, N: int, residue_modulus=None, capacity=None):
        if p not in SUPPORTED_PRIMES:
            raise UnsupportedPrime(f"p must be one of {SUPPORTED_PRIMES}, got {p}")
        if m < 1:
            raise ValueError("m must be >= 1")
        if N < 4:
            raise PrecisionTooLow(f"N must be >= 4, got {N}")
        self.p, self.m, self.N = p, m, N
        self.e = p - 1
        self.d = p**m
        self.capacity = capacity if capacity is not None else 2 * N + 12
        self.f = tuple(comb(p, k + 1) for k in range(p))  # f_0..f_{p-1}, monic
        if residue_modulus is None:
            if m == 1:
                field, _ = selfdual_normal_basis(p)
                residue_modulus = field.modulus
            else:
                residue_modulus = find_irreducible(p, self.d, random.Random(1000 * p + m))
        self.residue_field = ResidueField(p, residue_modulus)
        self.g = tuple(int(c) for c in residue_modulus)
        self._sigma_cache: dict[int, list[np.ndarray]] = {}
        self.sigma_u = self._newton_sigma_u()
        self._check_invariants()

    def __repr__(self):
        return f"TowerParams(p={self.p}, m={self.m}, N={self.N})"

    def __eq__(self, other):
        return isinstance(other, TowerParams) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    @property
    def key(self):
        return (self.p, self.m, self.N, self.g, self.capacity)

    # -- element constructors -------------------------------------------------

    def element(self, coeffs, pi_shift: int = 0, precision: int | None = None) -> "TowerElement":
        return TowerElement(self, coeffs, pi_shift, self.N if precision is None else precision)

    def zero(self, precision=None) -> "TowerElement":
        return self.element(_zeros((self.e, self.d)), 0, precision)

    def scalar(self, a: Union[int, PAdicScalar], precision=None) -> "TowerElement":
        if isinstance(a, PAdicScalar):
            precision = a.precision if precision is None else min(precision, a.precision)
            a = a.value
        c = _zeros((self.e, self.d))
        c[0, 0] = a
        return self.element(c, 0, precision)

    def one(self, precision=None) -> "TowerElement":
        return self.scalar(1, precision)

    def pi(self, precision=None) -> "TowerElement":
        c = _zeros((self.e, self.d))
        c[1, 0] = 1
        return self.element(c, 0, precision)

    def eta(self, precision=None) -> "TowerElement":
        return self.one(precision) + self.pi(precision)

    def u(self, precision=None) -> "TowerElement":
        c = _zeros((self.e, self.d))
        c[0, 1 % self.d] = 1
        if self.d == 1:
            raise ValueError("trivial extension has no u")
        return self.element(c, 0, precision)

    def monomial(self, i: int, j: int, precision=None) -> "TowerElement":
        """Pi^i u^j for any i >= 0, 0 <= j < p^m."""
        c = _zeros((self.e, self.d))
        c[0, j] = 1
        return self.element(c, i, precision).integral()

    def from_residue(self, r: ResidueElement, precision=None) -> "TowerElement":
        if r.field != self.residue_field:
            raise ParamsMismatch("residue element from a different field")
        c = _zeros((self.e, self.d))
        c[0, :] = list(r.coeffs)
        return self.element(c, 0, precision)

    def random_element(self, rng: random.Random, valuation: int = 0, precision=None, in_base=False) -> "TowerElement":
        """Uniform element of Pi^valuation O_M (or O_L if ``in_base``)."""
        prec = self.N if precision is None else precision
        mod = self.p**prec
        c = _zeros((self.e, self.d))
        for i in range(self.e):
            for j in range(1 if in_base else self.d):
                c[i, j] = rng.randrange(mod)
        return self.element(c, valuation, prec).integral()

    # -- cached structure -----------------------------------------------------

    @cached_property
    def trace_vector(self) -> tuple[int, ...]:
        """Tr_{L/Q_p}(Pi^i), i < p-1, as traces of multiplication matrices."""
        e = self.e
        comp = [[0] * e for _ in range(e)]  # multiplication by Pi in basis Pi^k
        for k in range(e - 1):
            comp[k + 1][k] = 1
        for k in range(e):
            comp[k][e - 1] = -self.f[k]
        out = []
        P = [[int(i == j) for j in range(e)] for i in range(e)]
        for _ in range(e):
            out.append(sum(P[k][k] for k in range(e)))
            P = [[sum(P[i][t] * comp[t][j] for t in range(e)) for j in range(e)] for i in range(e)]
        return tuple(out)

    def eps_inverse(self, precision: int) -> "TowerElement":
        """The unit p / Pi^(p-1) of O_L."""
        return self._eps_inverse_cap.with_precision(precision)

    @cached_property
    def _eps_inverse_cap(self) -> "TowerElement":
        c = _zeros((self.e, self.d))
        for k in range(self.e):
            c[k, 0] = -(self.f[k] // self.p)
        eps = self.element(c, 0, self.capacity)  # Pi^(p-1)/p
        return eps.inverse()

    def sigma_matrices(self, precision: int) -> list[np.ndarray]:
        if precision not in self._sigma_cache:
            mod = self.p**precision
            self._sigma_cache[precision] = [mat % mod for mat in self._sigma_cap]
        return self._sigma_cache[precision]

    @cached_property
    def _sigma_cap(self) -> list[np.ndarray]:
        """Integer matrices of sigma^k on the flattened (i, j) coordinates."""
        cap = self.capacity
        conj = [self._u_cap()]
        for _ in range(1, self.d):
            conj.append(_substitute_u(conj[-1], self.sigma_u))
        size = self.e * self.d
        mats = []
        for s in conj:
            mat = _zeros((size, size))
            power = self.one(cap)
            for j in range(self.d):
                col = power
                for i in range(self.e):
                    mat[:, i * self.d + j] = col.coeffs.reshape(-1)
                    col = col.times_pi()
                power = power * s
            mats.append(mat)
        return mats

    # -- construction helpers -------------------------------------------------

    def g_at(self, x: "TowerElement") -> "TowerElement":
        return _eval_u_poly(self, self.g, x)

    def _newton_sigma_u(self) -> "TowerElement":
        gprime = [k * self.g[k] for k in range(1, len(self.g))]
        s = _power_plain(self._u_cap(), self.p)
        for _ in range(64):
            gs = _eval_u_poly(self, self.g, s)
            if gs.is_zero():
                break
            ds = _eval_u_poly(self, gprime, s)
            s = s - gs * ds.inverse()
        if not _eval_u_poly(self, self.g, s).is_zero():
            raise ConstructionFailed("Newton iteration for sigma(u) did not converge")
        return s

    def _u_cap(self) -> "TowerElement":
        c = _zeros((self.e, self.d))
        if self.d > 1:
            c[0, 1] = 1
        return self.element(c, 0, self.capacity)

    def _check_invariants(self):
        p, f = self.p, self.f
        if f[-1] != 1 or f[0] % p or (f[0] // p) % p == 0 or any(c % p for c in f[:-1]):
            raise ConstructionFailed("f is not Eisenstein")
        if self.residue_field.degree != self.d:
            raise ConstructionFailed("residue modulus has the wrong degree")
        s = self.sigma_u
        if not self.g_at(s).is_zero():
            raise ConstructionFailed("g(sigma(u)) != 0")
        if self.residue(s) != self.residue(self._u_cap()) ** p:
            raise ConstructionFailed("sigma(u) is not congruent to u^p mod Pi")

    def residue(self, a: "TowerElement") -> ResidueElement:
        """Image of an integral element in the residue field O_M / Pi."""
        a = a.integral()
        if a.pi_shift > 0:
            return self.residue_field.zero()
        return self.residue_field([int(x) % self.p for x in a.coeffs[0, :]])


def make_tower(p: int, m: int, N: int) -> TowerParams:
    return TowerParams(p, m, N)


def _eval_u_poly(params: TowerParams, poly, x: "TowerElement") -> "TowerElement":
    """Horner evaluation of an integer polynomial at ``x``."""
    acc = params.zero(x.precision)
    for c in reversed(poly):
        acc = acc * x + c
    return acc


def _substitute_u(a: "TowerElement", s: "TowerElement") -> "TowerElement":
    params = a.params
    out = params.zero(a.precision)
    power = params.one(a.precision)
    for j in range(params.d):
        col = a.coeffs[:, j]
        if any(col):
            c = _zeros((params.e, params.d))
            c[:, 0] = col
            out = out + params.element(c, 0, a.precision) * power
        power = power * s
    return out.shift(a.pi_shift)


def _power_plain(a: "TowerElement", e: int) -> "TowerElement":
    result = a.params.one(a.precision)
    base = a
    while e:
        if e & 1:
            result = result * base
        base = base * base
        e >>= 1
    return result


Scalar = Union[int, PAdicScalar]


class TowerElement:
    """``Pi^pi_shift * sum coeffs[i, j] Pi^i u^j`` with coefficients mod p^precision."""

    __slots__ = ("params", "coeffs", "pi_shift", "precision")

    def __init__(self, params: TowerParams, coeffs, pi_shift: int = 0, precision: int | None = None):
        if precision is None:
            precision = params.N
        if precision < 0:
            raise PrecisionTooLow("negative precision")
        if precision > params.capacity:
            raise PrecisionTooLow(f"precision {precision} exceeds capacity {params.capacity}")
        arr = np.array(coeffs, dtype=object)
        if arr.shape != (params.e, params.d):
            raise ValueError(f"coefficient array must have shape {(params.e, params.d)}, got {arr.shape}")
        arr = arr % params.p**precision
        arr.flags.writeable = False
        self.params = params
        self.coeffs = arr
        self.pi_shift = int(pi_shift)
        self.precision = int(precision)

    # -- basics ---------------------------------------------------------------

    def __repr__(self):
        from .formats import element_to_text

        return f"TowerElement({element_to_text(self)}, prec={self.precision})"

    def _check(self, other: "TowerElement"):
        if other.params is not self.params and other.params != self.params:
            raise ParamsMismatch("elements from different towers")

    def _wrap(self, other) -> "TowerElement":
        if isinstance(other, TowerElement):
            self._check(other)
            return other
        if isinstance(other, (int, np.integer)):
            return self.params.scalar(int(other), self.precision)
        if isinstance(other, PAdicScalar):
            if other.prime != self.params.p:
                raise ParamsMismatch("scalar of a different prime")
            return self.params.scalar(other)
        return NotImplemented

    def with_precision(self, precision: int) -> "TowerElement":
        """Same representative read at another precision (lift or reduce)."""
        return TowerElement(self.params, self.coeffs, self.pi_shift, precision)

    def reduce(self, precision: int) -> "TowerElement":
        return self.with_precision(min(precision, self.precision))

    def is_zero(self) -> bool:
        return not self.coeffs.any()

    def u_part_is_zero(self) -> bool:
        return not self.coeffs[:, 1:].any()

    def l_coeffs(self) -> list[int]:
        return [int(x) for x in self.coeffs[:, 0]]

    @property
    def absolute_precision(self) -> int:
        return self.pi_shift + self.params.e * self.precision

    # -- Pi shifts ------------------------------------------------------------

    def shift(self, k: int) -> "TowerElement":
        """Multiply by Pi^k through the exponent; exact for every k."""
        return TowerElement(self.params, self.coeffs, self.pi_shift + k, self.precision)

    def times_pi(self) -> "TowerElement":
        """Multiply the coefficient array by Pi (exponent unchanged)."""
        e, f = self.params.e, self.params.f
        c = _zeros(self.coeffs.shape)
        c[1:, :] = self.coeffs[:-1, :]
        top = self.coeffs[-1, :]
        for k in range(e):
            c[k, :] = c[k, :] - f[k] * top
        return TowerElement(self.params, c, self.pi_shift, self.precision)

    def integral(self) -> "TowerElement":
        """Equal element with ``pi_shift == 0`` when that is exact.

        Positive exponents are multiplied out (no precision cost); negative
        ones go through :func:`div_exact_pi`.
        """
        if self.pi_shift == 0:
            return self
        if self.pi_shift > 0:
            return self.expand_shift()
        base = TowerElement(self.params, self.coeffs, 0, self.precision)
        return div_exact_pi(base, -self.pi_shift)

    def expand_shift(self) -> "TowerElement":
        """Fold a non-negative exponent into the coefficients."""
        if self.pi_shift < 0:
            raise ValueError("negative exponent; use integral()")
        a = TowerElement(self.params, self.coeffs, 0, self.precision)
        for _ in range(self.pi_shift):
            a = a.times_pi()
        return a

    def _aligned(self, other: "TowerElement"):
        """Both operands over the common exponent min(e1, e2)."""
        a, b = self, other
        if a.pi_shift == b.pi_shift:
            return a.coeffs, b.coeffs, a.pi_shift, min(a.precision, b.precision)
        if a.pi_shift > b.pi_shift:
            b, a = a, b
            swap = True
        else:
            swap = False
        k = b.pi_shift - a.pi_shift
        e = self.params.e
        bprec = b.precision + k // e
        prec = min(a.precision, bprec, self.params.capacity)
        bb = TowerElement(self.params, b.coeffs, k, prec).expand_shift()
        aa = a.coeffs
        if swap:
            return bb.coeffs, aa, a.pi_shift, prec
        return aa, bb.coeffs, a.pi_shift, prec

    # -- ring operations ------------------------------------------------------

    def __add__(self, other):
        other = self._wrap(other)
        if other is NotImplemented:
            return other
        a, b, shift, prec = self._aligned(other)
        return TowerElement(self.params, a + b, shift, prec)

    __radd__ = __add__

    def __neg__(self):
        return TowerElement(self.params, -self.coeffs, self.pi_shift, self.precision)

    def __sub__(self, other):
        other = self._wrap(other)
        if other is NotImplemented:
            return other
        a, b, shift, prec = self._aligned(other)
        return TowerElement(self.params, a - b, shift, prec)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, np.integer)):
            return TowerElement(self.params, self.coeffs * int(other), self.pi_shift, self.precision)
        if isinstance(other, PAdicScalar):
            prec = min(self.precision, other.precision)
            return TowerElement(self.params, self.coeffs * other.value, self.pi_shift, prec)
        if not isinstance(other, TowerElement):
            return NotImplemented
        self._check(other)
        prec = min(self.precision, other.precision)
        c = _mul_coeffs(self.params, self.coeffs, other.coeffs, self.params.p**prec)
        return TowerElement(self.params, c, self.pi_shift + other.pi_shift, prec)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result = self.params.one(self.precision)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other):
        other = self._wrap(other)
        if other is NotImplemented:
            return other
        return (self - other).is_zero()

    __hash__ = None

    def __truediv__(self, other):
        """Exact quotient; ``other`` may be any non-zero element."""
        other = self._wrap(other)
        if other is NotImplemented:
            return other
        v = pi_val(other)
        if is_exhausted(v):
            raise ZeroDivisionError("division by an element that is zero at precision")
        unit = div_exact_pi(other.with_shift_zero(), v - other.pi_shift)
        return (self * unit.inverse()).shift(-v)

    def with_shift_zero(self) -> "TowerElement":
        return TowerElement(self.params, self.coeffs, 0, self.precision)

    def inverse(self) -> "TowerElement":
        """Inverse of a unit (after removing a Pi exponent, if any)."""
        if self.pi_shift != 0:
            return self.with_shift_zero().inverse().shift(-self.pi_shift)
        params = self.params
        r = params.residue(self)
        if r.is_zero():
            raise NotAUnit("element is not a unit")
        z = params.from_residue(r.inverse(), self.precision)
        # Newton: z <- z (2 - a z) doubles the number of correct Pi-digits
        target = params.e * self.precision
        correct = 1
        while correct < target:
            z = z * (2 - self * z)
            correct *= 2
        return z


def _mul_coeffs(params: TowerParams, A: np.ndarray, B: np.ndarray, mod: int) -> np.ndarray:
    e, d = params.e, params.d
    a_base = not A[:, 1:].any()
    b_base = not B[:, 1:].any()
    if a_base and b_base:
        out = _zeros((2 * e - 1, 1))
        acol, bcol = A[:, 0], B[:, 0]
        for i in range(e):
            if acol[i]:
                out[i : i + e, 0] += acol[i] * bcol
        full = _zeros((2 * e - 1, d))
        full[:, 0] = out[:, 0]
        out = full
    else:
        if b_base and not a_base:
            A, B = B, A
            a_base, b_base = b_base, a_base
        out = _zeros((2 * e - 1, 2 * d - 1))
        if a_base:
            for i in range(e):
                a = A[i, 0]
                if a:
                    out[i : i + e, 0:d] += a * B
        else:
            for i in range(e):
                for j in range(d):
                    a = A[i, j]
                    if a:
                        out[i : i + e, j : j + d] += a * B
        out %= mod
        g = params.g
        glow = np.array(g[:d], dtype=object)
        for k in range(2 * d - 2, d - 1, -1):
            top = out[:, k]
            if top.any():
                out[:, k - d : k] -= np.outer(top, glow)
        out = out[:, :d]
    flow = np.array(params.f[:e], dtype=object)
    for k in range(2 * e - 2, e - 1, -1):
        top = out[k, :]
        if top.any():
            out[k - e : k, :] -= np.outer(flow, top)
    return out[:e, :] % mod


# -- module-level operations -------------------------------------------------


def mul(a: TowerElement, b: TowerElement) -> TowerElement:
    return a * b


def pi_val(a: TowerElement):
    """Largest k with a in Pi^k O_M, or ``>=cap`` when a is zero at precision."""
    p, e = a.params.p, a.params.e
    if a.is_zero():
        return at_least(a.absolute_precision)
    best = None
    for (i, j), c in np.ndenumerate(a.coeffs):
        if c:
            v = e * val_int(int(c), p, a.precision) + i
            if best is None or v < best:
                best = v
    return best + a.pi_shift


def div_exact_pi(a: TowerElement, k: int) -> TowerElement:
    """a / Pi^k as an element with ``pi_shift == a.pi_shift``.

    Costs ceil(k / (p-1)) p-digits of precision.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    if k == 0:
        return a
    params = a.params
    p, e = params.p, params.e
    v = pi_val(a) - a.pi_shift
    if v < k:
        raise NotDivisible(f"element of valuation {v} is not divisible by Pi^{k}")
    q, r = divmod(k, e)
    base = a.with_shift_zero()
    if r:
        q += 1
        for _ in range(e - r):
            base = base.times_pi()
    # a / Pi^(q(p-1)) = a * (p / Pi^(p-1))^q / p^q
    base = base * params.eps_inverse(base.precision) ** q
    div = p**q
    if any(int(x) % div for x in base.coeffs.flat):
        raise NotDivisible("coefficients not divisible at precision")
    if base.precision < q:
        raise PrecisionTooLow("not enough precision to divide")
    return TowerElement(params, base.coeffs // div, a.pi_shift, base.precision - q)


def div_exact_p(a: TowerElement, k: int = 1) -> TowerElement:
    """a / p^k on the coefficients; costs k digits."""
    div = a.params.p**k
    if any(int(x) % div for x in a.coeffs.flat):
        raise NotDivisible(f"coefficients not divisible by p^{k}")
    return TowerElement(a.params, a.coeffs // div, a.pi_shift, a.precision - k)


def apply_sigma(a: TowerElement, k: int = 1) -> TowerElement:
    """sigma^k with sigma the Frobenius lift u -> sigma(u); fixes L."""
    params = a.params
    k %= params.d
    if k == 0 or a.u_part_is_zero():
        return a
    mat = params.sigma_matrices(a.precision)[k]
    flat = mat.dot(a.coeffs.reshape(-1))
    return TowerElement(params, flat.reshape(params.e, params.d), a.pi_shift, a.precision)


def conjugates(a: TowerElement) -> list[TowerElement]:
    return [apply_sigma(a, k) for k in range(a.params.d)]


def trace_ML(a: TowerElement) -> TowerElement:
    """Sum of the p^m conjugates; lands in O_L."""
    if a.u_part_is_zero():
        return a * a.params.d
    out = a
    for k in range(1, a.params.d):
        out = out + apply_sigma(a, k)
    if not out.u_part_is_zero():
        raise NotInBaseField("trace_ML produced a non-zero u-part")
    return out


def trace_sub(a: TowerElement, step: int) -> TowerElement:
    """Trace to the fixed field of sigma^step (step divides p^m)."""
    d = a.params.d
    if d % step:
        raise ValueError("step must divide the extension degree")
    out = a
    for k in range(step, d, step):
        out = out + apply_sigma(a, k)
    return out


def norm_ML(a: TowerElement) -> TowerElement:
    """Product of the p^m conjugates; lands in O_L."""
    if a.u_part_is_zero():
        return a ** a.params.d
    out = a
    for k in range(1, a.params.d):
        out = out * apply_sigma(a, k)
    if not out.u_part_is_zero():
        raise NotInBaseField("norm_ML produced a non-zero u-part")
    return out


def trace_LK(a: TowerElement) -> PAdicScalar:
    """Tr_{L/Q_p} through the regular representation.

    A negative exponent is cleared with ``Pi^-k = Pi^(c(p-1)-k) eps^-c / p^c``
    and the trace is then divided by p^c exactly.
    """
    params = a.params
    if not a.u_part_is_zero():
        raise NotInBaseField("element has a non-zero u-part")
    p, e = params.p, params.e
    if a.pi_shift >= 0:
        b = a.expand_shift()
        c = 0
    else:
        k = -a.pi_shift
        c = -(-k // e)
        b = a.with_shift_zero()
        for _ in range(c * e - k):
            b = b.times_pi()
        b = b * params.eps_inverse(b.precision) ** c
    tv = params.trace_vector
    t = sum(int(b.coeffs[i, 0]) * tv[i] for i in range(e))
    mod = p**b.precision
    t %= mod
    if c:
        if t % p**c:
            raise NotDivisible("trace is not integral")
        return PAdicScalar(p, b.precision - c, t // p**c)
    return PAdicScalar(p, b.precision, t)


def teichmuller(params: TowerParams, r: ResidueElement, precision=None) -> TowerElement:
    """The (q-1)-th root of unity lifting ``r`` (q = residue field size)."""
    prec = params.N if precision is None else precision
    if r.is_zero():
        return params.zero(prec)
    q = params.residue_field.size
    x = params.from_residue(r, prec)
    for _ in range(prec):
        x = x**q
    return x
