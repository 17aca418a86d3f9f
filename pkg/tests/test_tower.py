import random
from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from reclab.errors import NotAUnit, NotDivisible, NotInBaseField, PrecisionTooLow, UnsupportedPrime
from reclab.padic import is_exhausted
from reclab.residue import frobenius
from reclab.tower import (
    TowerParams,
    apply_sigma,
    conjugates,
    div_exact_pi,
    norm_ML,
    pi_val,
    teichmuller,
    trace_LK,
    trace_ML,
    trace_sub,
)

seeds = st.integers(0, 2**32)


def _trace_pi_power_oracle(p, i):
    """Tr(Pi^i) from Pi = eta - 1 and Tr(eta^j) = p-1 if p | j else -1."""
    return sum(comb(i, j) * (-1) ** (i - j) * (p - 1 if j % p == 0 else -1) for j in range(i + 1))


def _fprime(params):
    Pi = params.pi()
    out = params.zero()
    for k in range(1, params.p):
        out = out + Pi ** (k - 1) * (k * params.f[k])
    return out


@pytest.mark.parametrize("p", [3, 5, 7])
def test_eisenstein_structure(p):
    P = TowerParams(p, 1, 6)
    eta = P.eta()
    assert eta**p == 1
    assert not (eta == 1)
    assert pi_val(P.scalar(p)) == p - 1
    assert pi_val(P.pi()) == 1
    assert pi_val(P.pi() ** (p + 2)) == p + 2


@pytest.mark.parametrize("p", [3, 5, 7])
def test_trace_vector_matches_root_of_unity_oracle(p):
    P = TowerParams(p, 1, 6)
    for i in range(2 * p):
        assert trace_LK(P.pi() ** i).centered() == _trace_pi_power_oracle(p, i)
    assert trace_LK(P.one()).centered() == p - 1
    assert trace_LK(P.eta()).centered() == -1


@pytest.mark.parametrize("p", [3, 5, 7])
def test_different_traces(p):
    P = TowerParams(p, 1, 8)
    fp = _fprime(P)
    for i in range(p - 2):
        assert trace_LK(P.pi() ** i / fp).value == 0
    assert trace_LK(P.pi() ** (p - 2) / fp).value == 1
    assert P.pi() ** 2 * fp * P.eta() == P.pi() * p


def test_trace_with_negative_shift_needs_integrality(tower3):
    with pytest.raises(NotDivisible):
        trace_LK(tower3.one().shift(-2))  # Pi^-2 = -eta^-1 / 3 has trace 1/3
    assert trace_LK(tower3.scalar(3).shift(-2)).precision < tower3.N


@pytest.mark.parametrize("p,k", [(3, 0), (3, 1), (3, 2), (3, 5), (5, 3), (5, 4), (5, 9), (7, 6), (7, 13)])
def test_div_exact_pi_round_trip(p, k):
    P = TowerParams(p, 1, 8)
    for s in range(5):
        a = P.random_element(random.Random(s), valuation=k)
        q = div_exact_pi(a, k)
        assert q.shift(k) == a.reduce(q.precision)
        assert q.precision == a.precision - (-(-k // (p - 1)))


def test_div_exact_pi_rejects_low_valuation(tower3):
    with pytest.raises(NotDivisible):
        div_exact_pi(tower3.pi(), 2)


@settings(max_examples=40, deadline=None)
@given(seeds, seeds)
def test_ring_axioms_and_sigma_homomorphism(s1, s2):
    P = TowerParams(3, 1, 6)
    a = P.random_element(random.Random(s1))
    b = P.random_element(random.Random(s2))
    assert a * b == b * a
    assert (a + b) * a == a * a + b * a
    assert apply_sigma(a * b) == apply_sigma(a) * apply_sigma(b)
    assert apply_sigma(a + b) == apply_sigma(a) + apply_sigma(b)
    assert apply_sigma(a, P.d) == a
    assert norm_ML(a * b) == norm_ML(a) * norm_ML(b)
    assert trace_ML(a + b) == trace_ML(a) + trace_ML(b)


def test_sigma_fixes_L_and_lifts_frobenius(tower3m2):
    P = tower3m2
    a = P.random_element(random.Random(3), in_base=True)
    assert apply_sigma(a) == a
    u = P.u()
    assert P.residue(apply_sigma(u)) == frobenius(P.residue(u))
    assert P.g_at(P.sigma_u).is_zero()
    assert len(conjugates(u)) == 9
    h = trace_sub(u, 3)  # trace down to the degree-3 subextension
    assert apply_sigma(h, 3) == h


@pytest.mark.parametrize("p,m", [(3, 1), (5, 1), (7, 1), (3, 2)])
def test_inverse(p, m):
    P = TowerParams(p, m, 6)
    a = P.random_element(random.Random(2))
    if P.residue(a).is_zero():
        a = a + 1
    assert a * a.inverse() == 1
    with pytest.raises(NotAUnit):
        P.pi().inverse()


def test_division_by_non_units(tower5):
    P = tower5
    a = P.random_element(random.Random(5))
    b = P.pi() ** 3 * (1 + P.u())
    q = a / b
    assert q * b == a.reduce(q.precision)


def test_teichmuller_lift(tower3m2):
    P = tower3m2
    q = P.residue_field.size
    r = P.residue_field.random_element(random.Random(0))
    T = teichmuller(P, r)
    assert T**q == T and P.residue(T) == r


def test_trace_ML_of_non_fixed_element_lands_in_L(tower3):
    t = trace_ML(tower3.u())
    assert t.u_part_is_zero()
    with pytest.raises(NotInBaseField):
        trace_LK(tower3.u())


def test_pi_val_of_zero_is_exhausted(tower3):
    v = pi_val(tower3.zero())
    assert is_exhausted(v) and v == 2 * 8


def test_parameter_validation():
    with pytest.raises(UnsupportedPrime):
        TowerParams(2, 1, 8)
    with pytest.raises(UnsupportedPrime):
        TowerParams(11, 1, 8)
    with pytest.raises(PrecisionTooLow):
        TowerParams(3, 1, 3)


def test_addition_aligns_shifts(tower3):
    P = tower3
    a = P.one().shift(-2)  # Pi^-2
    s = a + P.one()
    assert s.shift(2) == P.one() + P.pi() ** 2
