"""Generators of F(m_M) as a Z_p[G]-module for the multiplicative law.

The system is xi, omega, theta_1..theta_{p-2} with the single relation
``(sigma -_F 1)(omega) = [p](xi)``.  Everything here runs at the tower's
working precision ``N``; the checks compare at that precision.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

from .errors import (
    ConstructionFailed,
    ConvergenceStall,
    NoSolution,
    NoUnitCandidate,
    NotDivisible,
    SigmaVarianceDetected,
)
from .fgl import TorsionPoint, f_exp, f_int_mult, f_log, f_norm_operator, f_sub, f_sum
from .linalg import ModularSolver
from .padic import PAdicScalar, is_exhausted
from .residue import selfdual_normal_basis, trace_one_element
from .tower import TowerElement, TowerParams, apply_sigma, norm_ML, pi_val, trace_LK, trace_ML, trace_sub

#: Seed of the pseudorandom fallback in the Hilbert-90 candidate sweep.
OMEGA_FALLBACK_SEED = 0x5EED
OMEGA_RANDOM_BUDGET = 64


def chi(params: TowerParams) -> TowerElement:
    """An element of O_M with Tr_{M/L} = 1 exactly at precision.

    The residue is tau (m = 1) or a trace-1 element of the residue field;
    ``chi <- chi (2 - Tr chi)`` then squares the trace defect each pass.
    """
    if params.m == 1:
        field_, tau = selfdual_normal_basis(params.p)
        r = tau if field_ == params.residue_field else trace_one_element(params.residue_field)
    else:
        r = trace_one_element(params.residue_field)
    c = params.from_residue(r)
    for _ in range(64):
        t = trace_ML(c)
        if t == 1:
            return c
        c = c + (1 - t) * c
    raise ConvergenceStall("trace correction for chi did not converge")


def _norm_preimage(params: TowerParams, target: TowerElement, start: TowerElement, chi_: TowerElement) -> TowerElement:
    """z in m_M with N_{M/L}(1+z) = target (a principal unit of L).

    Each pass multiplies 1+z by 1 + e*chi where 1+e is the remaining
    defect; since N(1 + e chi) = 1 + e + O(e^2) the defect valuation at
    least doubles.
    """
    z = start
    last = 0
    for _ in range(64):
        e = target * norm_ML(1 + z).inverse() - 1
        if e.is_zero():
            return z
        v = pi_val(e)
        if v <= last:
            raise ConvergenceStall(f"norm defect stuck at valuation {v}")
        last = v
        z = (1 + z) * (1 + e * chi_) - 1
    raise ConvergenceStall("norm preimage did not converge")


def xi(params: TowerParams, chi_: TowerElement | None = None) -> TowerElement:
    """xi with N_F(xi) = Pi, starting from Pi*chi."""
    chi_ = chi(params) if chi_ is None else chi_
    return _norm_preimage(params, params.eta(), params.pi() * chi_, chi_)


def theta(params: TowerParams, i: int, chi_: TowerElement | None = None) -> TowerElement:
    """theta_i with N_F(theta_i) = Exp(Pi^(i+1)), 1 <= i <= p-2."""
    if not 1 <= i <= params.p - 2:
        raise ValueError(f"theta index must lie in [1, {params.p - 2}]")
    chi_ = chi(params) if chi_ is None else chi_
    target = 1 + f_exp(params.monomial(i + 1, 0))
    return _norm_preimage(params, target, params.zero(), chi_)


def _teichmuller_prime(r: int, p: int, precision: int) -> int:
    mod = p**precision
    t = r % mod
    for _ in range(precision):
        t = pow(t, p, mod)
    return t


def _omega_candidates(params: TowerParams):
    for j in range(params.d):
        yield params.monomial(0, j)
    rng = random.Random(OMEGA_FALLBACK_SEED)
    for _ in range(OMEGA_RANDOM_BUDGET):
        yield params.random_element(rng)


def omega(params: TowerParams, xi_: TowerElement, candidates=None) -> TowerElement:
    """omega with sigma(1+omega)/(1+omega) = (1+xi)^p (Hilbert 90).

    With v = (1+xi)^p of norm 1, b = sum_k (prod_{i<k} sigma^i v) sigma^k(alpha)
    satisfies v sigma(b) = b, so w = 1/b has sigma(w)/w = v.  b is a unit
    exactly when the residue trace of alpha is non-zero.
    """
    v = (1 + xi_) ** params.p
    if not (norm_ML(v) == 1):
        raise ConstructionFailed("N(1+xi)^p != 1; xi is not a norm preimage of eta")
    conj_v = [apply_sigma(v, k) for k in range(params.d)]
    for alpha in candidates if candidates is not None else _omega_candidates(params):
        b = params.zero()
        prefix = params.one()
        for k in range(params.d):
            b = b + prefix * apply_sigma(alpha, k)
            prefix = prefix * conj_v[k]
        r = params.residue(b)
        if r.is_zero():
            continue
        w = b.inverse()
        t = _teichmuller_prime(params.residue(w).to_prime(), params.p, w.precision)
        w = w * pow(t, -1, params.p**w.precision)
        return w - 1
    raise NoUnitCandidate("no Hilbert-90 candidate gave a unit")


def coboundary_trace_log(params: TowerParams, xi_: TowerElement, chi_: TowerElement) -> TowerElement:
    """-p Tr(sum_{k>=1} sigma^k(chi) (lambda xi + ... + sigma^{k-1} lambda xi)).

    This is the additive Hilbert-90 solution of sigma(L) - L = p lambda(xi),
    so it agrees with Tr lambda(omega) up to the trace of a sigma-fixed term.
    """
    lx = f_log(xi_)
    acc = params.zero(lx.precision)
    partial = params.zero(lx.precision)
    for k in range(1, params.d):
        partial = partial + apply_sigma(lx, k - 1)
        acc = acc + apply_sigma(chi_, k) * partial
    return -params.p * trace_ML(acc)


def big_omega(omega_: TowerElement) -> TowerElement:
    """Omega = N_F(omega)."""
    return f_norm_operator(omega_)


def _integral_vector(a: TowerElement) -> list[int]:
    a = a.integral()
    return [int(c) for c in a.coeffs.reshape(-1)]


@dataclass(frozen=True, eq=False)
class GeneratorSystem:
    params: TowerParams
    chi: TowerElement
    xi: TowerElement
    omega: TowerElement
    thetas: tuple[TowerElement, ...]
    zeta: TorsionPoint
    big_omega: TowerElement
    epsilons: tuple[TowerElement, ...]  # lambda(N_F theta_i) = Pi^(i+1)
    lambda_omega_big: TowerElement
    checks: tuple[tuple[str, bool], ...]
    _columns: list = field(repr=False, compare=False, default=None)

    @property
    def ok(self) -> bool:
        return all(ok for _, ok in self.checks)

    def column_vectors(self) -> list[list[int]]:
        """sigma^j of lambda(theta_i), lambda(omega), lambda(xi) as integer vectors."""
        return self._columns

    @property
    def column_labels(self) -> list[tuple[str, int, int]]:
        d = self.params.d
        labels = [("d", i, j) for i in range(1, self.params.p - 1) for j in range(d)]
        labels += [("c", 0, j) for j in range(d)]
        labels += [("b", 0, j) for j in range(d)]
        return labels


def _check_system(params, chi_, xi_, omega_, thetas, Omega, lam_Omega) -> list[tuple[str, bool]]:
    p, e = params.p, params.e
    Pi = params.pi()
    checks = [("Tr chi = 1", trace_ML(chi_) == 1)]
    checks.append(("N_F xi = Pi", f_norm_operator(xi_) == Pi))
    checks.append(("xi = Pi chi mod Pi^2", _val_at_least(xi_ - Pi * chi_, 2)))
    residual = f_sub(f_sub(apply_sigma(omega_, 1), omega_), f_int_mult(p, xi_))
    checks.append(("relation residual = 0", residual.is_zero()))
    for i, th in enumerate(thetas, start=1):
        checks.append((f"lambda(N_F theta_{i}) = Pi^{i + 1}", f_log(f_norm_operator(th)) == params.monomial(i + 1, 0)))
    checks.append(("Omega in L", Omega.u_part_is_zero()))
    checks.append(("lambda Omega = -p Pi mod p Pi^2", _val_at_least(lam_Omega + p * Pi, e + 2)))
    tr = trace_LK(lam_Omega.shift(-1) * params.eta())
    checks.append(("Tr(Pi^-1 eta lambda Omega) = p mod p^2", tr.value % p**2 == p and tr.precision >= 2))
    cob = coboundary_trace_log(params, xi_, chi_)
    checks.append(("coboundary trace formula = lambda Omega mod p Pi^2", _val_at_least(cob - lam_Omega, e + 2)))
    return checks


def _val_at_least(a: TowerElement, k: int) -> bool:
    v = pi_val(a)
    return is_exhausted(v) or v >= k


def build_generators(params: TowerParams) -> GeneratorSystem:
    """Construct and check the full system; raises ConstructionFailed on a failed check."""
    chi_ = chi(params)
    xi_ = xi(params, chi_)
    omega_ = omega(params, xi_)
    thetas = tuple(theta(params, i, chi_) for i in range(1, params.p - 1))
    Omega = big_omega(omega_)
    lam_Omega = f_log(Omega)
    checks = _check_system(params, chi_, xi_, omega_, thetas, Omega, lam_Omega)
    failed = [name for name, ok in checks if not ok]
    if failed:
        raise ConstructionFailed(f"generator invariants failed: {failed}")
    epsilons = tuple(params.monomial(i + 1, 0) for i in range(1, params.p - 1))
    gens = GeneratorSystem(
        params=params,
        chi=chi_,
        xi=xi_,
        omega=omega_,
        thetas=thetas,
        zeta=TorsionPoint(params.pi(), 1),
        big_omega=Omega,
        epsilons=epsilons,
        lambda_omega_big=lam_Omega,
        checks=tuple(checks),
    )
    columns = []
    for base in [f_log(t) for t in thetas] + [f_log(omega_), f_log(xi_)]:
        for j in range(params.d):
            columns.append(_integral_vector(apply_sigma(base, j)))
    object.__setattr__(gens, "_columns", columns)
    return gens


@lru_cache(maxsize=None)
def generator_system(params: TowerParams) -> GeneratorSystem:
    """Cached :func:`build_generators` (systems are immutable)."""
    return build_generators(params)


# -- decomposition --------------------------------------------------------------


@dataclass(frozen=True)
class Decomposition:
    d: tuple[tuple[PAdicScalar, ...], ...]  # d[i-1][j]
    c: tuple[PAdicScalar, ...]
    b: tuple[PAdicScalar, ...]
    precision: int


def decomposition_precision(params: TowerParams) -> int:
    return params.N - params.m - 1


@lru_cache(maxsize=None)
def _solver(gens: GeneratorSystem, column_order: tuple[int, ...] | None) -> ModularSolver:
    cols = gens.column_vectors()
    A = [[col[r] for col in cols] for r in range(len(cols[0]))]
    return ModularSolver(A, gens.params.p, gens.params.N, column_order)


def decompose(params: TowerParams, gens: GeneratorSystem, y: TowerElement, column_order: Sequence[int] | None = None) -> Decomposition:
    """Coefficients with lambda(y) = sum d_ij sigma^j lambda(theta_i) + sum c_j sigma^j lambda(omega) + sum b_j sigma^j lambda(xi).

    The system is underdetermined (the relation and the torsion point both
    lie in the kernel); the solver's particular solution is returned.
    """
    if y.params != params or gens.params != params:
        raise ValueError("y and generator system must live in params")
    p, d = params.p, params.d
    rhs = _integral_vector(f_log(y.reduce(params.N)))
    order = tuple(column_order) if column_order is not None else None
    sol = _solver(gens, order).solve(rhs)
    target = decomposition_precision(params)
    prec = min(sol.precision, y.precision - params.m - 1)
    if prec < target and prec < y.precision - params.m - 1:
        raise AssertionError(f"decomposition lost more than m+1 digits ({sol.precision} < {target})")
    prec = min(prec, target)
    scal = [PAdicScalar(p, prec, v) for v in sol.x]
    nd = (p - 2) * d
    dm = tuple(tuple(scal[(i * d) : (i + 1) * d]) for i in range(p - 2))
    return Decomposition(d=dm, c=tuple(scal[nd : nd + d]), b=tuple(scal[nd + d :]), precision=prec)


def substitute(params: TowerParams, gens: GeneratorSystem, dec: Decomposition) -> TowerElement:
    """The right-hand side of the lambda-linearized expansion."""
    cols = gens.column_vectors()
    coeffs = [x.value for row in dec.d for x in row] + [x.value for x in dec.c] + [x.value for x in dec.b]
    mod = params.p**dec.precision
    flat = [sum(k * col[r] for k, col in zip(coeffs, cols)) % mod for r in range(len(cols[0]))]
    import numpy as np

    arr = np.array(flat, dtype=object).reshape(params.e, params.d)
    return params.element(arr, 0, dec.precision)


def gamma_hat(dec: Decomposition, params: TowerParams) -> PAdicScalar:
    """p * sum(c) / p^m as a p-adic number (not reduced mod p)."""
    p, m = params.p, params.m
    s = sum(x.value for x in dec.c) % p**dec.precision
    if s % p ** (m - 1):
        raise NotDivisible(f"sum of c_j = {s} is not divisible by p^{m - 1}")
    return PAdicScalar(p, dec.precision - (m - 1), s // p ** (m - 1))


def gamma_from_decomposition(dec: Decomposition, params: TowerParams) -> PAdicScalar:
    """gamma = p * sum(c) / p^m mod p."""
    g = gamma_hat(dec, params)
    return PAdicScalar(params.p, 1, g.value)


def verify_main_equation(x: TowerElement, dec: Decomposition, gens: GeneratorSystem) -> TowerElement:
    """lambda(x) - sum p d_i Pi^(i+1) - gamma_hat lambda(Omega).

    The returned residual is reduced to the precision the decomposition
    supports; it is zero for a correct decomposition.
    """
    params = gens.params
    p = params.p
    mod = p**dec.precision
    ds = []
    for i, row in enumerate(dec.d, start=1):
        vals = {x_.value % mod for x_ in row}
        if len(vals) > 1:
            raise SigmaVarianceDetected(f"d_{i}j depends on j: {sorted(vals)}")
        ds.append(row[0])
    g = gamma_hat(dec, params)
    res_prec = g.precision + 1
    res = f_log(x)
    for i, di in enumerate(ds, start=1):
        res = res - params.monomial(i + 1, 0) * (p * di.value)
    res = res - gens.lambda_omega_big * g.value
    return res.reduce(res_prec)


# -- forward generation of valid inputs ---------------------------------------


@dataclass(frozen=True)
class ValidInput:
    x: TowerElement
    certificate: TowerElement  # y with [p](y) = x
    gamma: int  # symbol value built into y


def forward_valid_input(params: TowerParams, gens: GeneratorSystem, rng: random.Random, gamma: int | None = None) -> ValidInput:
    """x = [p](y) for y a group-ring combination whose sigma-difference is torsion.

    With delta_j = p c_j + b_{j-1} - b_j all equal to gamma, sigma(y) -_F y
    is [gamma](zeta), so x lies in L and its symbol is gamma by construction.
    """
    p, d, m = params.p, params.d, params.m
    mod = p**params.N
    g = rng.randrange(p) if gamma is None else gamma % p
    c = [rng.randrange(mod) for _ in range(d - 1)]
    c.append(p ** (m - 1) * g - sum(c))
    b = [rng.randrange(mod)]
    for j in range(1, d):
        b.append(b[-1] + p * c[j] - g)
    terms = []
    for th in gens.thetas:
        terms.append(f_int_mult(rng.randrange(mod), f_norm_operator(th)))
    for j in range(d):
        terms.append(f_int_mult(c[j], apply_sigma(gens.omega, j)))
        terms.append(f_int_mult(b[j], apply_sigma(gens.xi, j)))
    y = f_sum(terms, params)
    x = f_int_mult(p, y)
    if not x.u_part_is_zero():
        raise ConstructionFailed("forward-generated x is not in L")
    return ValidInput(x=x, certificate=y, gamma=g)


def random_base_input(params: TowerParams, rng: random.Random) -> TowerElement:
    """A random element of Pi^p O_L; every such x is in [p]F(m_M)."""
    return params.random_element(rng, valuation=params.p, in_base=True)
