import pytest
from hypothesis import given, strategies as st

from reclab.errors import NotAUnit, NotDivisible, PrimeMismatch, UnsupportedPrime
from reclab.padic import PAdicScalar, at_least, div_exact_p, inv_unit, is_exhausted, val_int, val_p

primes = st.sampled_from([3, 5, 7])


@given(primes, st.integers(1, 12), st.integers(), st.integers())
def test_ring_operations_match_integers_mod_pn(p, n, a, b):
    x, y = PAdicScalar(p, n, a), PAdicScalar(p, n, b)
    mod = p**n
    assert (x + y).value == (a + b) % mod
    assert (x - y).value == (a - b) % mod
    assert (x * y).value == (a * b) % mod
    assert (-x).value == -a % mod


@given(primes, st.integers(1, 10), st.integers(1, 10), st.integers(), st.integers())
def test_mixed_precision_takes_minimum(p, n1, n2, a, b):
    s = PAdicScalar(p, n1, a) + PAdicScalar(p, n2, b)
    assert s.precision == min(n1, n2)
    assert s.value == (a + b) % p ** min(n1, n2)


@given(primes, st.integers(1, 10), st.integers())
def test_unit_inverse(p, n, a):
    x = PAdicScalar(p, n, a)
    if a % p == 0:
        with pytest.raises(NotAUnit):
            inv_unit(x)
    else:
        assert (x * inv_unit(x)).value == 1


@given(primes, st.integers(1, 10), st.integers(0, 10**9))
def test_valuation_brute_force(p, n, a):
    x = PAdicScalar(p, n, a)
    v = val_p(x)
    if x.value == 0:
        assert is_exhausted(v) and v == n
    else:
        k = 0
        while x.value % p ** (k + 1) == 0:
            k += 1
        assert v == k and not is_exhausted(v)


def test_exhausted_valuation_is_labelled():
    v = val_p(PAdicScalar(3, 8, 0))
    assert repr(v) == ">=8"
    assert not is_exhausted(val_p(PAdicScalar(3, 8, 9)))
    assert is_exhausted(at_least(4))


def test_exact_division_loses_precision():
    q = div_exact_p(PAdicScalar(5, 8, 75), 2)
    assert q.value == 3 and q.precision == 6
    with pytest.raises(NotDivisible):
        div_exact_p(PAdicScalar(5, 8, 10), 2)


def test_rejects_two_and_composites():
    for bad in (2, 9, 15, 1):
        with pytest.raises(UnsupportedPrime):
            PAdicScalar(bad, 4, 1)


def test_prime_mismatch():
    with pytest.raises(PrimeMismatch):
        PAdicScalar(3, 4, 1) + PAdicScalar(5, 4, 1)


def test_centered_and_equality_at_common_precision():
    assert PAdicScalar(3, 4, 80).centered() == -1
    assert PAdicScalar(3, 4, 1) == PAdicScalar(3, 2, 10)
    assert PAdicScalar(3, 4, 1) != PAdicScalar(3, 4, 10)


def test_val_int_cap():
    assert val_int(0, 3, 7) == 7
    assert val_int(54, 3, 7) == 3
