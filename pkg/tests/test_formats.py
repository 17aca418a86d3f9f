import random

import pytest
from hypothesis import given, settings, strategies as st

from reclab.errors import ParseError
from reclab.formats import element_from_json, element_to_json, element_to_text, parse_element
from reclab.tower import TowerParams


@pytest.fixture(scope="module")
def P():
    return TowerParams(3, 1, 8)


def test_parse_examples(P):
    assert parse_element(P, "P + 2*P*u^2") == P.pi() + 2 * P.pi() * P.u() ** 2
    assert parse_element(P, "(1+P)^3") == 1
    assert parse_element(P, "P**2") == P.pi() ** 2
    assert parse_element(P, "-u + 3") == 3 - P.u()
    assert parse_element(P, "0").is_zero()


@pytest.mark.parametrize("bad", ["P+", "x", "P^-1", "P^u", "1/2", "P.real", "2.5"])
def test_parse_errors(P, bad):
    with pytest.raises(ParseError):
        parse_element(P, bad)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32), st.integers(-3, 3))
def test_text_and_json_round_trip(seed, shift):
    P = TowerParams(3, 1, 8)
    a = P.random_element(random.Random(seed)).shift(shift)
    b = element_from_json(P, element_to_json(a))
    assert b.pi_shift == a.pi_shift and b.precision == a.precision
    assert (b.coeffs == a.coeffs).all()
    if shift == 0:
        c = parse_element(P, element_to_text(a))
        assert (c.coeffs == a.coeffs).all()


def test_json_errors(P):
    with pytest.raises(ParseError):
        element_from_json(P, "{not json")
    with pytest.raises(ParseError):
        element_from_json(P, '{"coeffs": [[1.5, 0, 0], [0, 0, 0]]}')
