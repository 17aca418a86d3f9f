"""Formal group laws.

The multiplicative law ``F(X, Y) = X + Y + XY`` acts on tower elements in
closed form: ``[a](x) = (1+x)^a - 1``, ``log`` and ``exp`` are the usual
series.  General Lubin-Tate laws live in :class:`LubinTateLaw` as truncated
power series.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Sequence, Union

import numpy as np

from .errors import ExpDiverges, NotInMaximalIdeal, TruncationTooSmall
from .padic import PAdicScalar, is_exhausted, val_int
from .tower import TowerElement, TowerParams, div_exact_p, norm_ML, pi_val

Scalar = Union[int, PAdicScalar]


def _require_maximal(*xs: TowerElement) -> None:
    for x in xs:
        v = pi_val(x)
        if not is_exhausted(v) and v < 1:
            raise NotInMaximalIdeal(f"element of valuation {v} is not in the maximal ideal")


# -- multiplicative law on tower elements -------------------------------------


def f_add(x: TowerElement, y: TowerElement) -> TowerElement:
    _require_maximal(x, y)
    return x + y + x * y


def f_neg(x: TowerElement) -> TowerElement:
    _require_maximal(x)
    return (1 + x).inverse() - 1


def f_sub(x: TowerElement, y: TowerElement) -> TowerElement:
    _require_maximal(x, y)
    return (1 + x) * (1 + y).inverse() - 1


def f_sum(xs: Sequence[TowerElement], params: TowerParams | None = None) -> TowerElement:
    """Formal sum of a sequence (the empty sum is 0)."""
    if not xs:
        return params.zero()
    acc = 1 + xs[0]
    for x in xs[1:]:
        _require_maximal(x)
        acc = acc * (1 + x)
    return acc - 1


def f_int_mult(a: Scalar, x: TowerElement) -> TowerElement:
    """[a](x) = (1+x)^a - 1 through the integer lift of a.

    [p^n](x) has valuation >= v(x) + n(p-1), so once n is the working
    precision the lift of a only matters modulo p^n.
    """
    _require_maximal(x)
    params = x.params
    if isinstance(a, PAdicScalar):
        prec = min(a.precision, x.precision)
        x = x.reduce(prec)
        a_int = a.value % params.p**prec
    else:
        prec = x.precision
        a_int = a % params.p**prec
    v = pi_val(x)
    floor = (v if not is_exhausted(v) else x.absolute_precision) + prec * params.e
    assert floor >= x.absolute_precision, "[p^N] does not vanish at working precision"
    return (1 + x) ** a_int - 1


def _log_terms(v: int, target: int, e: int, p: int) -> int:
    """Smallest K with k*v - e*v_p(k) >= target for every k > K."""
    k = 1
    last_needed = 1
    # k*v - e*log_p(k) is eventually increasing; scan well past the target
    while k <= 4 * target + 4 * p:
        if k * v - e * val_int(k, p, 64) < target:
            last_needed = k
        k += 1
    return last_needed


def f_log(x: TowerElement) -> TowerElement:
    """log(1+x) = sum (-1)^(k+1) x^k / k, with guard digits for the divisions."""
    _require_maximal(x)
    params = x.params
    p, e = params.p, params.e
    x = x.integral()
    v = pi_val(x)
    prec = x.precision
    if is_exhausted(v):
        return params.zero(prec)
    target = e * prec
    K = _log_terms(v, target, e, p)
    guard = max(val_int(k, p, 64) for k in range(1, K + 1))
    xw = x.with_precision(prec + guard)
    acc = params.zero(prec + guard)
    power = xw
    for k in range(1, K + 1):
        if k > 1:
            power = power * xw
        j = val_int(k, p, 64)
        term = div_exact_p(power, j) if j else power
        unit = k // p**j
        term = term * pow(unit, -1, p**term.precision)
        acc = acc + term if k % 2 else acc - term
    if acc.precision < prec:
        raise AssertionError("guard digits exhausted in f_log")
    return acc.reduce(prec)


def f_exp(x: TowerElement) -> TowerElement:
    """exp(x) - 1, defined for v(x) >= 2."""
    params = x.params
    p, e = params.p, params.e
    x = x.integral()
    v = pi_val(x)
    prec = x.precision
    if is_exhausted(v):
        return params.zero(prec)
    if v < 2:
        raise ExpDiverges(f"exp needs valuation >= 2, got {v}")
    target = e * prec
    # term k has valuation >= k*v - e*v_p(k!) >= k + 1
    K = 1
    fact_val = 0
    guard = 0
    k = 1
    while True:
        fact_val += val_int(k, p, 64)
        if k * v - e * fact_val < target:
            K = k
            guard = fact_val
        elif k > target + 2:
            break
        k += 1
    xw = x.with_precision(prec + guard)
    acc = params.zero(prec + guard)
    term = params.one(prec + guard)
    for k in range(1, K + 1):
        term = term * xw
        j = val_int(k, p, 64)
        if j:
            term = div_exact_p(term, j)
        term = term * pow(k // p**j, -1, p**term.precision)
        acc = acc + term
    if acc.precision < prec:
        raise AssertionError("guard digits exhausted in f_exp")
    return acc.reduce(prec)


def f_norm_operator(x: TowerElement) -> TowerElement:
    """x +_F sigma(x) +_F ... over all p^m conjugates."""
    _require_maximal(x)
    return norm_ML(1 + x) - 1


@dataclass(frozen=True)
class TorsionPoint:
    zeta: TowerElement
    level: int

    def __post_init__(self):
        p = self.zeta.params.p
        if not f_int_mult(p**self.level, self.zeta).is_zero():
            raise ValueError("point is not killed by [p^level]")
        if self.level > 0 and f_int_mult(p ** (self.level - 1), self.zeta).is_zero():
            raise ValueError("point has smaller order than p^level")


def standard_torsion(params: TowerParams) -> TorsionPoint:
    """zeta = Pi = eta - 1, the generator of the p-torsion."""
    return TorsionPoint(params.pi(), 1)


class MultiplicativeLaw:
    """Namespace bundling the closed-form multiplicative operations."""

    add = staticmethod(f_add)
    neg = staticmethod(f_neg)
    sub = staticmethod(f_sub)
    int_mult = staticmethod(f_int_mult)
    log = staticmethod(f_log)
    exp = staticmethod(f_exp)
    norm_operator = staticmethod(f_norm_operator)

    @staticmethod
    def series(X, Y):
        return X + Y + X * Y


# -- truncated power series ---------------------------------------------------


def _umul(a: Sequence, b: Sequence, D: int) -> list:
    out = [0] * D
    for i, x in enumerate(a[:D]):
        if x:
            for j, y in enumerate(b[: D - i]):
                if y:
                    out[i + j] += x * y
    return out


def _upowers(a: Sequence, D: int, n: int) -> list[list]:
    """[a^0, a^1, ..., a^(n-1)] truncated below degree D."""
    pw = [[1] + [0] * (D - 1)]
    for _ in range(1, n):
        pw.append(_umul(pw[-1], a, D))
    return pw


def _ucompose(outer: Sequence, inner: Sequence, D: int) -> list:
    """outer(inner(X)) with inner(0) = 0."""
    out = [0] * D
    pw = [1] + [0] * (D - 1)
    for k, c in enumerate(outer[:D]):
        if k:
            pw = _umul(pw, inner, D)
        if c:
            for i, x in enumerate(pw):
                out[i] += c * x
    return out


def _reversion(a: Sequence, D: int) -> list:
    """Compositional inverse of a series X + a_2 X^2 + ..."""
    b = [0, 1] + [0] * (D - 2)
    for n in range(2, D):
        comp = _ucompose(a, b, n + 1)
        b[n] = b[n] - comp[n]
    return b


def _to_mod(c: Fraction, p: int, mod: int) -> int:
    if c.denominator % p == 0:
        raise ArithmeticError(f"coefficient {c} is not p-integral")
    return c.numerator * pow(c.denominator, -1, mod) % mod


def _frac_val(c: Fraction, p: int) -> int:
    if c == 0:
        return 10**9
    return val_int(abs(c.numerator), p, 10**6) - val_int(c.denominator, p, 10**6)


class _Bivariate:
    """Helpers for series mod (total degree D) with integer entries mod ``mod``."""

    def __init__(self, D: int, mod: int):
        self.D, self.mod = D, mod
        self.dtype = np.int64 if mod * mod * D * D < 2**62 else object
        idx = np.add.outer(np.arange(D), np.arange(D))
        self.mask = idx < D

    def zeros(self, dims=2):
        return np.zeros((self.D,) * dims, dtype=self.dtype)

    def mul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        D = self.D
        out = self.zeros()
        for i, j in zip(*np.nonzero(a)):
            c = a[i, j]
            out[i:, j:] += c * b[: D - i, : D - j]
            out[i:, j:] %= self.mod
        out[~self.mask] = 0
        return out % self.mod


class LubinTateLaw:
    """Truncated Lubin-Tate law over Z/p^N with [p](X) = isogeny(X).

    The logarithm solves ``lambda(isogeny(X)) = p * lambda(X)``; ``F`` and
    ``[a]`` are ``exp(lambda(X) + lambda(Y))`` and ``exp(a * lambda(X))``,
    built over Q and then reduced, after asserting p-integrality.
    """

    def __init__(self, p: int, q: int, D: int, N: int = 8, isogeny: Sequence[int] | None = None, endo_range=None):
        k = 0
        qq = q
        while qq % p == 0:
            qq //= p
            k += 1
        if qq != 1 or k < 1:
            raise ValueError("q must be a positive power of p")
        if D < 2 * q:
            raise TruncationTooSmall(f"truncation degree {D} < 2q = {2 * q}")
        self.p, self.q, self.D, self.N = p, q, D, N
        self.mod = p**N
        if isogeny is None:
            isogeny = [0, p] + [0] * (D - 2)
            if q < D:
                isogeny[q] = 1
        iso = [Fraction(int(c)) for c in list(isogeny)[:D]] + [Fraction(0)] * max(0, D - len(isogeny))
        if iso[0] != 0 or iso[1] != p:
            raise ValueError("isogeny must be p*X + higher terms")
        self.isogeny_q = iso
        self.log_q = self._solve_log(iso)
        self.exp_q = _reversion(self.log_q, D)
        self._log_powers = _upowers(self.log_q, D, D)
        self.F = self._build_F()
        endo_range = range(-1, p + 2) if endo_range is None else endo_range
        self.endo = {a: self._build_endo(a) for a in endo_range}
        self.log_scale = max(0, -min(_frac_val(c, p) for c in self.log_q[1:]))

    def _solve_log(self, iso: list) -> list:
        p, D = self.p, self.D
        fpow = _upowers(iso, D, D)
        lam = [Fraction(0), Fraction(1)] + [Fraction(0)] * (D - 2)
        for n in range(2, D):
            s = sum(lam[k] * fpow[k][n] for k in range(1, n))
            lam[n] = s / (p - Fraction(p) ** n)
        return lam

    def _build_F(self) -> np.ndarray:
        D, p = self.D, self.p
        P = self._log_powers
        W = [[self.exp_q[i + j] * comb(i + j, i) if i + j < D else 0 for j in range(D)] for i in range(D)]
        # F[a][b] = sum_{i,j} P[i][a] W[i][j] P[j][b]
        left = [[sum(P[i][a] * W[i][j] for i in range(D) if P[i][a]) for j in range(D)] for a in range(D)]
        F = np.zeros((D, D), dtype=np.int64 if self.mod**2 * D * D < 2**62 else object)
        for a in range(D):
            for b in range(D - a):
                c = sum(left[a][j] * P[j][b] for j in range(D) if P[j][b])
                F[a, b] = _to_mod(Fraction(c), p, self.mod)
        return F

    def _build_endo(self, a: int) -> list[int]:
        D = self.D
        out = [Fraction(0)] * D
        for k in range(1, D):
            c = self.exp_q[k] * Fraction(a) ** k
            if c:
                for n, x in enumerate(self._log_powers[k]):
                    out[n] += c * x
        return [_to_mod(c, self.p, self.mod) for c in out]

    def scaled_log(self) -> list[int]:
        """p^s * lambda mod p^N with s the largest denominator exponent."""
        s = Fraction(self.p) ** self.log_scale
        return [_to_mod(c * s, self.p, self.mod) for c in self.log_q]

    def isogeny(self) -> list[int]:
        return [_to_mod(c, self.p, self.mod) for c in self.isogeny_q]


def multiplicative_series_law(p: int, D: int, N: int = 8) -> LubinTateLaw:
    """The multiplicative law as the Lubin-Tate law of (1+X)^p - 1."""
    iso = [comb(p, k) if 1 <= k <= p else 0 for k in range(D)]
    return LubinTateLaw(p, p, D, N, isogeny=iso)


def lt_make(p: int, q: int, D: int | None = None, N: int = 8) -> LubinTateLaw:
    if D is None:
        D = 2 * q * q
    return LubinTateLaw(p, q, D, N)


@dataclass
class AxiomReport:
    D: int
    modulus: int
    first_failure: dict[str, int]  # identity -> lowest failing degree (D if none)

    @property
    def ok(self) -> bool:
        return all(v >= self.D for v in self.first_failure.values())

    @property
    def max_failing_degree(self) -> int:
        return min(self.first_failure.values(), default=self.D)

    def rows(self) -> list[tuple[str, bool, int]]:
        return [(name, deg >= self.D, deg) for name, deg in self.first_failure.items()]


def _first_bad_degree(diff: np.ndarray, D: int) -> int:
    nz = np.argwhere(diff != 0)
    if nz.size == 0:
        return D
    return int(nz.sum(axis=1).min())


def lt_check_axioms(law: LubinTateLaw, endo_pairs=None) -> AxiomReport:
    """Machine-check the law's identities mod (degree D, p^N)."""
    D, p, mod = law.D, law.p, law.mod
    bv = _Bivariate(D, mod)
    F = np.array(law.F, dtype=bv.dtype) % mod
    F[~bv.mask] = 0
    res: dict[str, int] = {}

    X = bv.zeros()
    X[1, 0] = 1
    res["F(X,0)=X"] = _first_bad_degree((F[:, :1] - X[:, :1]) % mod, D)
    lin = bv.zeros()
    lin[1, 0] = lin[0, 1] = 1
    lin_part = F.copy()
    lin_part[np.add.outer(np.arange(D), np.arange(D)) >= 2] = 0
    res["F=X+Y mod deg 2"] = _first_bad_degree((lin_part - lin) % mod, D)
    res["commutativity"] = _first_bad_degree((F - F.T) % mod, D)

    # powers of F(X, Y), reused for both sides of associativity
    G = [bv.zeros()]
    G[0][0, 0] = 1
    for _ in range(1, D):
        G.append(bv.mul(G[-1], F))
    left = bv.zeros(3)  # F(F(X,Y), Z)
    right = bv.zeros(3)  # F(X, F(Y,Z))
    for i in range(D):
        for j in range(D - i):
            c = F[i, j]
            if c:
                left[:, :, j] = (left[:, :, j] + c * G[i]) % mod
                right[i, :, :] = (right[i, :, :] + c * G[j]) % mod
    deg3 = np.add.outer(np.add.outer(np.arange(D), np.arange(D)), np.arange(D))
    diff = (left - right) % mod
    diff[deg3 >= D] = 0
    res["associativity"] = _first_bad_degree(diff, D)

    # scaled log: Lam(F(X,Y)) = Lam(X) + Lam(Y)
    lam = law.scaled_log()
    lhs = bv.zeros()
    for k in range(1, D):
        if lam[k]:
            lhs = (lhs + lam[k] * G[k]) % mod
    rhs = bv.zeros()
    for k in range(D):
        rhs[k, 0] = (rhs[k, 0] + lam[k]) % mod
        rhs[0, k] = (rhs[0, k] + lam[k]) % mod
    res["log additivity"] = _first_bad_degree((lhs - rhs) % mod, D)

    def ufail(a, b):
        for n in range(D):
            if (a[n] - b[n]) % mod:
                return n
        return D

    def ucomp(a, b):
        return [c % mod for c in _ucompose(a, b, D)]

    iso = law.isogeny()
    endo_p = law.endo.get(p) or law._build_endo(p)
    res["[p]=isogeny"] = ufail(endo_p, iso)
    res["log([p]X)=p log X"] = ufail(ucomp(lam, endo_p), [p * c % mod for c in lam])
    xq = [0] * D
    if law.q < D:
        xq[law.q] = 1
    res["[p](X)=X^q mod p"] = next((n for n in range(D) if (endo_p[n] - xq[n]) % p), D)
    res["[1]=X"] = ufail(law.endo.get(1) or law._build_endo(1), [0, 1] + [0] * (D - 2))
    if endo_pairs is None:
        keys = sorted(k for k in law.endo if k >= 0)
        endo_pairs = [(a, b) for a in keys for b in keys if a * b in law.endo]
    worst = D
    for a, b in endo_pairs:
        worst = min(worst, ufail(ucomp(law.endo[a], law.endo[b]), law.endo[a * b]))
    res["[a][b]=[ab]"] = worst
    return AxiomReport(D, mod, res)
