import math
from decimal import Decimal
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from rcrt.exceptions import DomainError, NotCoprimeError
from rcrt.numtheory import (
    PHI,
    ceil_div,
    check_linear_in_seed,
    check_mixed_docagne,
    fib_like,
    fib_like_terms,
    gcd_ext,
    iroot_ceil,
    pairwise_coprime,
    remainder_chain,
    to_fraction,
)


@pytest.mark.parametrize(
    "value, expected",
    [
        (3, Fraction(3)),
        ("136/7", Fraction(136, 7)),
        ("363.64", Fraction(36364, 100)),
        (0.1, Fraction(1, 10)),
        (Decimal("2.5"), Fraction(5, 2)),
        (Fraction(1, 3), Fraction(1, 3)),
    ],
)
def test_to_fraction(value, expected):
    assert to_fraction(value) == expected


@pytest.mark.parametrize("bad", ["abc", "1/0", float("nan"), float("inf")])
def test_to_fraction_rejects(bad):
    with pytest.raises(DomainError):
        to_fraction(bad)


def test_to_fraction_rejects_bool():
    with pytest.raises(TypeError):
        to_fraction(True)


@given(st.integers(1, 10**12), st.integers(1, 6))
def test_iroot_ceil_is_minimal(value, n):
    t = iroot_ceil(value, n)
    assert t**n >= value
    assert t == 1 or (t - 1) ** n < value


def test_gcd_ext_examples():
    g, u, v = gcd_ext(12, 17)
    assert g == 1 and 12 * u + 17 * v == 1
    assert gcd_ext(0, 5)[0] == 5


def test_gcd_ext_coprime_families():
    for a in range(1, 1001):
        assert gcd_ext(a, a + 1)[0] == 1
        assert gcd_ext(2 * a - 1, 2 * a + 3)[0] == 1


@given(st.integers(0, 10**9), st.integers(0, 10**9))
def test_gcd_ext_bezout(a, b):
    if a == b == 0:
        with pytest.raises(DomainError):
            gcd_ext(a, b)
        return
    g, u, v = gcd_ext(a, b)
    assert g == math.gcd(a, b)
    assert u * a + v * b == g


@pytest.mark.parametrize("a, b", [(-1, 3), (0, 0)])
def test_gcd_ext_domain(a, b):
    with pytest.raises(DomainError):
        gcd_ext(a, b)


@pytest.mark.parametrize(
    "pair, sigma",
    [((12, 17), (5, 2, 1)), ((34, 47), (13, 8, 5, 3, 2, 1)), ((9, 10), (1,)), ((5, 7), (2, 1))],
)
def test_remainder_chain_examples(pair, sigma):
    ch = remainder_chain(*pair)
    assert ch.sigma == sigma
    assert ch.depth == len(sigma) - 1


def test_remainder_chain_errors():
    with pytest.raises(NotCoprimeError) as info:
        remainder_chain(6, 9)
    assert info.value.gcd == 3
    with pytest.raises(DomainError):
        remainder_chain(1, 5)
    with pytest.raises(DomainError):
        remainder_chain(7, 5)


@given(st.integers(2, 10**6), st.integers(1, 10**6))
def test_remainder_chain_recurrence(g1, gap):
    g2 = g1 + gap
    if math.gcd(g1, g2) != 1:
        return
    ch = remainder_chain(g1, g2)
    full = (g2, g1) + ch.sigma
    for j in range(2, len(full)):
        assert full[j] == full[j - 2] % full[j - 1]
    assert ch.sigma[-1] == 1
    assert list(ch.sigma) == sorted(ch.sigma, reverse=True)
    assert len(set(ch.sigma)) == len(ch.sigma)


def test_quotients():
    assert remainder_chain(12, 17).quotients == (2, 2, 2)


def test_fib_like_examples():
    assert fib_like_terms(0, 6) == [0, 1, 1, 2, 3, 5]
    assert fib_like_terms(2, 6) == [2, 1, 3, 4, 7, 11]
    assert fib_like_terms(1, 7) == [1, 1, 2, 3, 5, 8, 13]


def test_fib_like_domain():
    with pytest.raises(DomainError):
        fib_like(1, -1)
    with pytest.raises(DomainError):
        fib_like(-1, 3)


def test_fib_like_big_values_exact():
    assert fib_like(0, 300) > 2**200
    assert fib_like(0, 300) == fib_like(0, 299) + fib_like(0, 298)


def test_linear_in_seed_examples():
    assert check_linear_in_seed(3, 4)
    assert check_linear_in_seed(0, 2)
    with pytest.raises(DomainError):
        check_linear_in_seed(1, 1)


def test_linear_in_seed_grid():
    assert all(check_linear_in_seed(d, k) for d in range(21) for k in range(2, 31))


def test_mixed_docagne_examples():
    assert check_mixed_docagne(1, 3, 1)
    lhs = fib_like(1, 3) * fib_like(1, 1) - fib_like(1, 4) * fib_like(1, 0)
    assert lhs == -2
    for t in range(1, 10):
        assert check_mixed_docagne(2, t, t)
    with pytest.raises(DomainError):
        check_mixed_docagne(1, 2, 3)


def test_mixed_docagne_grid():
    assert all(check_mixed_docagne(d, s, t) for d in range(11) for s in range(1, 26) for t in range(1, s + 1))


@given(st.integers(0, 50), st.integers(1, 200))
def test_consecutive_terms_coprime(d, k):
    assert math.gcd(fib_like(d, k), fib_like(d, k + 1)) == 1


def test_golden_ratio_limit():
    for d in range(11):
        for k in range(40, 60):
            assert abs(fib_like(d, k + 1) / fib_like(d, k) - PHI) < 1e-6


def test_coprime_families():
    for a in range(1, 10001):
        assert math.gcd(a, a + 1) == 1
        assert math.gcd(2 * a - 1, 2 * a + 1) == 1
        assert pairwise_coprime((2 * a - 1, 2 * a + 1, 2 * a + 3))
        if a % 2:
            assert pairwise_coprime((a, a + 1, a + 2))


def test_ceil_div():
    assert ceil_div(143, 11) == 13
    assert ceil_div("7/2", 1) == 4
