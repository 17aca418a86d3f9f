import random

import pytest
from hypothesis import given, settings, strategies as st

from reclab.errors import NoRootInM, NotInBaseField
from reclab.fgl import f_add, f_int_mult
from reclab.generators import forward_valid_input, generator_system, random_base_input
from reclab.symbol import (
    SymbolResult,
    compare_all,
    divide_isogeny,
    gamma_artin_hasse,
    gamma_borevich,
    gamma_direct,
    gamma_general,
    gamma_trace_equation,
)
from reclab.tower import TowerParams, apply_sigma

ROUTES = [gamma_direct, gamma_artin_hasse, gamma_trace_equation, gamma_borevich]


@pytest.fixture(scope="module")
def P3():
    return TowerParams(3, 1, 8)


def test_divide_isogeny_zero(P3):
    assert divide_isogeny(P3, P3.zero()).is_zero()


@pytest.mark.parametrize("p", [3, 5, 7])
def test_divide_isogeny_of_p_multiple(p):
    P = TowerParams(p, 1, 6)
    rng = random.Random(p)
    for _ in range(3):
        z = P.random_element(rng, valuation=1, in_base=True)
        x = f_int_mult(p, z)
        y = divide_isogeny(P, x)
        assert (1 + y) ** p == (1 + x).reduce(y.precision)
        # y and z differ by a p-th root of unity
        q = (1 + y) * (1 + z).inverse()
        assert any(q == P.eta() ** j for j in range(p))


@pytest.mark.parametrize("p", [3, 5, 7])
def test_low_valuation_has_no_unramified_root(p):
    P = TowerParams(p, 1, 6)
    rng = random.Random(0)
    with pytest.raises(NoRootInM):
        divide_isogeny(P, P.pi())
    for k in range(1, p):
        x = P.random_element(rng, valuation=k, in_base=True)
        while P.residue(x.shift(-k).integral()).is_zero():
            x = P.random_element(rng, valuation=k, in_base=True)
        with pytest.raises(NoRootInM):
            divide_isogeny(P, x)


def test_divide_isogeny_requires_base_field(P3):
    with pytest.raises(NotInBaseField):
        divide_isogeny(P3, P3.pi() ** 3 * P3.u())


@pytest.mark.parametrize("route", ROUTES, ids=lambda r: r.__name__)
def test_zero_and_p_multiples_give_zero(route, P3):
    assert route(P3, P3.zero()).gamma == 0
    rng = random.Random(9)
    for _ in range(3):
        z = P3.random_element(rng, valuation=1, in_base=True)
        assert route(P3, f_int_mult(3, z), check_stability=False).gamma == 0


@pytest.mark.parametrize("p,m", [(3, 1), (5, 1), (3, 2)])
def test_routes_agree_with_constructed_gamma(p, m):
    P = TowerParams(p, m, 8)
    G = generator_system(P)
    rng = random.Random(100 + p)
    for _ in range(5):
        vi = forward_valid_input(P, G, rng)
        for route in ROUTES:
            assert route(P, vi.x, check_stability=False).gamma == vi.gamma
        x = random_base_input(P, rng)
        gs = {route(P, x, check_stability=False).gamma for route in ROUTES}
        assert len(gs) == 1


def test_root_choice_independence(P3):
    G = generator_system(P3)
    vi = forward_valid_input(P3, G, random.Random(5), gamma=2)
    zeta = P3.pi()
    for a in range(3):
        y = f_add(vi.certificate, f_int_mult(a, zeta))
        u = (1 + apply_sigma(y)) * (1 + y).inverse()
        assert u == P3.eta() ** 2


def test_general_symbol(P3):
    G = generator_system(P3)
    vi = forward_valid_input(P3, G, random.Random(2), gamma=1)
    assert gamma_general(P3, P3.pi(), vi.x).gamma == 1
    assert gamma_general(P3, P3.pi() ** 2, vi.x).gamma == 2
    assert gamma_general(P3, P3.eta() + P3.pi() ** 2, vi.x).gamma == 0  # a unit
    assert gamma_general(P3, P3.scalar(3), vi.x).gamma == (-1) % 3
    with pytest.raises(ValueError):
        gamma_general(P3, P3.zero(), vi.x)


def test_symbol_result_json():
    r = SymbolResult(gamma=2, method="artin_hasse", precision_used=8, stable=True)
    assert SymbolResult.from_json(r.to_json()) == r
    assert r.to_json() == '{"gamma": 2, "method": "artin_hasse", "precision_used": 8, "stable": true}'
    with pytest.raises(ValueError):
        SymbolResult(0, "guess", 8, True)


def test_compare_all_zero(P3):
    r = compare_all(P3, P3.zero())
    assert r.verdict == "agree" and r.exit_code == 0
    assert set(r.gammas.values()) == {0}


def test_compare_all_zeta_is_classified_invalid(P3):
    r = compare_all(P3, P3.pi())
    assert r.outcomes["direct"].rejected
    assert r.verdict.startswith("invalid") and r.exit_code == 2


def test_artin_hasse_trace_is_always_divisible_on_m_L():
    # lambda(m_L) = Pi^2 O_L, so the trace never fails to be divisible by p
    for p in (3, 5, 7):
        P = TowerParams(p, 1, 6)
        rng = random.Random(p)
        for k in range(1, p):
            x = P.random_element(rng, valuation=k, in_base=True)
            gamma_artin_hasse(P, x, check_stability=False)
        assert gamma_artin_hasse(P, P.pi(), check_stability=False).gamma == 0


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**32), st.integers(0, 2**32), st.integers(-20, 20))
def test_pairing_is_linear_in_x(s1, s2, a):
    P = TowerParams(3, 1, 8)
    G = generator_system(P)
    v1 = forward_valid_input(P, G, random.Random(s1))
    v2 = forward_valid_input(P, G, random.Random(s2))
    for route in (gamma_direct, gamma_artin_hasse):
        g1 = route(P, v1.x, check_stability=False).gamma
        g2 = route(P, v2.x, check_stability=False).gamma
        assert route(P, f_add(v1.x, v2.x), check_stability=False).gamma == (g1 + g2) % 3
        assert route(P, f_int_mult(a, v1.x), check_stability=False).gamma == a * g1 % 3


def test_stability_flag(P3):
    G = generator_system(P3)
    vi = forward_valid_input(P3, G, random.Random(1))
    for route in ROUTES:
        r = route(P3, vi.x)
        assert r.stable and r.precision_used == 8 and 0 <= r.gamma < 3
