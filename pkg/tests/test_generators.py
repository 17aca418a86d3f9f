import random

import pytest

from reclab.errors import NotDivisible, SigmaVarianceDetected
from reclab.fgl import f_int_mult, f_log, f_sub
from reclab.generators import (
    Decomposition,
    build_generators,
    chi,
    decompose,
    forward_valid_input,
    gamma_from_decomposition,
    gamma_hat,
    generator_system,
    omega,
    substitute,
    verify_main_equation,
)
from reclab.padic import PAdicScalar, is_exhausted
from reclab.residue import frobenius, selfdual_normal_basis
from reclab.tower import TowerParams, apply_sigma, pi_val, trace_LK, trace_ML, trace_sub

CONFIGS = [(3, 1, 8), (5, 1, 8), (7, 1, 6), (3, 2, 8)]


@pytest.fixture(scope="module", params=CONFIGS, ids=lambda c: "p%d-m%d" % c[:2])
def system(request):
    P = TowerParams(*request.param)
    return P, generator_system(P)


def _vanishes(a, k):
    v = pi_val(a)
    return is_exhausted(v) or v >= k


def test_all_invariants_hold(system):
    P, G = system
    assert G.ok, [name for name, ok in G.checks if not ok]
    assert len(G.thetas) == P.p - 2
    assert G.big_omega.u_part_is_zero()


def test_chi_residue_is_tau():
    P = TowerParams(3, 1, 8)
    _, tau = selfdual_normal_basis(3)
    c = chi(P)
    assert P.residue(c) == tau
    assert trace_ML(c) == 1


def test_chi_trace_through_intermediate_field():
    P = TowerParams(3, 2, 8)
    c = chi(P)
    h = trace_sub(c, 3)  # trace to the degree-3 subextension H
    assert apply_sigma(h, 3) == h
    assert h + apply_sigma(h, 1) + apply_sigma(h, 2) == 1


def test_log_xi_residue(system):
    P, G = system
    # lambda(xi) = Pi (chi - chi^p) mod Pi^2
    c = G.chi
    assert _vanishes(f_log(G.xi) - P.pi() * (c - c**P.p), 2)
    assert P.residue(apply_sigma(c)) == frobenius(P.residue(c))


def test_omega_unique_up_to_fixed_elements():
    P = TowerParams(3, 2, 6)
    G = generator_system(P)
    other = omega(P, G.xi, candidates=[P.monomial(0, 2), P.monomial(0, 1)])
    diff = f_sub(G.omega, other)
    assert f_sub(apply_sigma(diff), diff).is_zero()
    residual = f_sub(f_sub(apply_sigma(other), other), f_int_mult(3, G.xi))
    assert residual.is_zero()


def test_lambda_big_omega_residue_congruence(system):
    P, G = system
    p = P.p
    assert _vanishes(G.lambda_omega_big + p * P.pi(), p + 1)
    den = trace_LK(G.lambda_omega_big.shift(-1) * P.eta())
    assert den.value % p**2 == p


def test_decompose_xi_and_zeta(system):
    P, G = system
    d = P.d
    dec = decompose(P, G, G.xi)
    assert substitute(P, G, dec) == f_log(G.xi).reduce(dec.precision)
    # the obvious expansion of xi is a solution as well
    zero = PAdicScalar(P.p, dec.precision, 0)
    one = PAdicScalar(P.p, dec.precision, 1)
    obvious = Decomposition(
        d=tuple((zero,) * d for _ in range(P.p - 2)),
        c=(zero,) * d,
        b=(one,) + (zero,) * (d - 1),
        precision=dec.precision,
    )
    assert substitute(P, G, obvious) == f_log(G.xi).reduce(dec.precision)
    assert gamma_from_decomposition(dec, P).value == 0
    dz = decompose(P, G, P.pi())
    assert substitute(P, G, dz).is_zero()
    assert gamma_from_decomposition(dz, P).value == 0


def test_decomposition_precision_budget(system):
    P, G = system
    dec = decompose(P, G, G.omega)
    assert dec.precision == P.N - P.m - 1


def test_decomposition_of_base_field_element_gives_zero(system):
    P, G = system
    rng = random.Random(3)
    for _ in range(3):
        y = P.random_element(rng, valuation=1, in_base=True)
        dec = decompose(P, G, y)
        assert gamma_from_decomposition(dec, P).value == 0


def test_forward_inputs_decompose_consistently(system):
    P, G = system
    rng = random.Random(17)
    p, d = P.p, P.d
    ncols = p * d
    seen_solutions = set()
    for trial in range(4):
        vi = forward_valid_input(P, G, rng)
        assert vi.x.u_part_is_zero()
        assert f_int_mult(p, vi.certificate) == vi.x
        dec = decompose(P, G, vi.certificate)
        assert substitute(P, G, dec) == f_log(vi.certificate).reduce(dec.precision)
        assert gamma_from_decomposition(dec, P).value == vi.gamma
        res = verify_main_equation(vi.x, dec, G)
        assert res.is_zero(), res
        # Tr(Pi^-1 eta lambda x) = gamma_hat Tr(Pi^-1 eta lambda Omega)
        g = gamma_hat(dec, P)
        lhs = trace_LK(f_log(vi.x).shift(-1) * P.eta())
        rhs = trace_LK(G.lambda_omega_big.shift(-1) * P.eta())
        n = min(lhs.precision, rhs.precision, g.precision + 1)
        assert (lhs.value - g.value * rhs.value) % p**n == 0
        # solver independence: permuted pivoting, same gamma
        for shift in (1, 2, 5):
            order = [(c + shift * d) % ncols for c in range(ncols)][::-1]
            other = decompose(P, G, vi.certificate, column_order=order)
            seen_solutions.add(tuple(x.value for x in other.c + other.b))
            assert gamma_from_decomposition(other, P).value == vi.gamma
    assert len(seen_solutions) > 1


def test_sigma_variance_detected():
    P = TowerParams(3, 1, 8)
    G = generator_system(P)
    s = lambda v: PAdicScalar(3, 6, v)  # noqa: E731
    dec = Decomposition(d=((s(1), s(2), s(1)),), c=(s(0),) * 3, b=(s(0),) * 3, precision=6)
    with pytest.raises(SigmaVarianceDetected):
        verify_main_equation(P.zero(), dec, G)


def test_zero_input_main_equation():
    P = TowerParams(5, 1, 8)
    G = generator_system(P)
    dec = decompose(P, G, P.zero())
    assert verify_main_equation(P.zero(), dec, G).is_zero()


def test_gamma_requires_divisible_sum_for_m2():
    P = TowerParams(3, 2, 8)
    s = lambda v: PAdicScalar(3, 5, v)  # noqa: E731
    dec = Decomposition(d=((s(0),) * 9,), c=(s(1),) + (s(0),) * 8, b=(s(0),) * 9, precision=5)
    with pytest.raises(NotDivisible):
        gamma_from_decomposition(dec, P)


def test_build_is_deterministic():
    P = TowerParams(3, 1, 8)
    a, b = build_generators(P), build_generators(P)
    assert a.omega == b.omega and a.xi == b.xi
