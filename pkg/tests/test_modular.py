import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kloostermax.errors import DomainError
from kloostermax.modular import (
    INFINITY,
    MoebiusMap,
    check_prime,
    inverse_table,
    is_odd_prime,
    mod_inverse,
    moebius_apply,
    pow_mod_array,
    roots_table,
)

PRIMES = [3, 5, 7, 11, 101, 1009, 10007]


def trial_division(n):
    if n < 2:
        return False
    return all(n % d for d in range(2, math.isqrt(n) + 1))


def test_primality_matches_trial_division():
    for n in range(0, 5000):
        assert is_odd_prime(n) == (trial_division(n) and n != 2)


@pytest.mark.parametrize("n", [2**31 - 1, 100003, 2147483629])
def test_large_primes(n):
    assert is_odd_prime(n)


@pytest.mark.parametrize("n", [561, 1105, 2**31 - 3, 3215031751, 100000])
def test_composites_and_pseudoprimes(n):
    assert not is_odd_prime(n)


@pytest.mark.parametrize("bad", [2, 9, 1, 0, -7, 2**31 + 11])
def test_check_prime_rejects(bad):
    with pytest.raises(DomainError):
        check_prime(bad)


@given(st.sampled_from(PRIMES), st.integers(min_value=1, max_value=10**9))
def test_inverse_property(p, x):
    if x % p == 0:
        with pytest.raises(DomainError):
            mod_inverse(x, p)
    else:
        assert x * mod_inverse(x, p) % p == 1


def test_inverse_table_and_powers():
    p = 1009
    inv = inverse_table(p)
    x = np.arange(1, p)
    assert np.all(x * inv[1:] % p == 1)
    assert np.array_equal(pow_mod_array(x, 3, p), np.array([pow(int(v), 3, p) for v in x]))


def test_roots_table():
    r = roots_table(7)
    assert abs(r[0] - 1) < 1e-15
    assert np.allclose(r, np.exp(2j * np.pi * np.arange(7) / 7), atol=1e-15)


def test_projective_equality():
    p = 101
    m = MoebiusMap(2, 3, 5, 7, p)
    assert m == MoebiusMap(4, 6, 10, 14, p)
    assert hash(m) == hash(MoebiusMap(202 + 4, 6, 10, 14, p))
    assert m != MoebiusMap(2, 3, 5, 8, p)
    with pytest.raises(DomainError):
        MoebiusMap(1, 2, 2, 4, p)


maps = st.tuples(*[st.integers(0, 100)] * 4).filter(lambda t: (t[0] * t[3] - t[1] * t[2]) % 101)


@settings(max_examples=60)
@given(maps, maps, st.integers(0, 100))
def test_compose_and_inverse(t1, t2, a):
    p = 101
    f, g = MoebiusMap(*t1, p), MoebiusMap(*t2, p)
    lhs = moebius_apply(f.compose(g), a)
    ga = moebius_apply(g, a)
    assert lhs == moebius_apply(f, ga)
    assert moebius_apply(f.inverse(), moebius_apply(f, a)) == a
    assert f.compose(f.inverse()) == MoebiusMap.identity(p)


@settings(max_examples=40)
@given(maps)
def test_vectorised_action_matches_scalar(t):
    p = 101
    f = MoebiusMap(*t, p)
    pts = np.arange(p + 1)  # p encodes infinity
    out = f.apply_array(pts)
    for a, b in zip(pts, out):
        s = moebius_apply(f, INFINITY if a == p else int(a))
        assert (b == p) if s is INFINITY else (b == s)


def test_infinity_handling():
    p = 11
    assert moebius_apply(MoebiusMap.dilation(3, p), INFINITY) is INFINITY
    inv = MoebiusMap(0, 1, 1, 0, p)
    assert moebius_apply(inv, 0) is INFINITY
    assert moebius_apply(inv, INFINITY) == 0
    assert moebius_apply(MoebiusMap.translation(4, p), 9) == 2
