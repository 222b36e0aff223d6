from math import gcd, prod

import pytest
from hypothesis import given
from hypothesis import strategies as st

from twosquares.arithmetic import (
    Factorization,
    crt_combine,
    euler_phi,
    factorize,
    is_prime,
    multiplicative_order,
    primes_up_to,
    two_adic_split,
)


def _trial_primes(n):
    return [p for p in range(2, n + 1) if all(p % d for d in range(2, int(p**0.5) + 1))]


def test_primes_up_to_matches_naive():
    assert primes_up_to(1000) == _trial_primes(1000)
    assert primes_up_to(1) == []


@pytest.mark.parametrize(
    "n, expected",
    [
        (1, ()),
        (72, ((2, 3), (3, 2))),
        (6830208, ((2, 7), (3, 2), (7, 2), (11, 2))),
        (2**61 - 1, ((2**61 - 1, 1),)),
        (999983 * 1000003, ((999983, 1), (1000003, 1))),
    ],
)
def test_factorize_examples(n, expected):
    assert factorize(n).factors == expected


def test_factorize_rejects_zero_and_huge():
    with pytest.raises(ValueError):
        factorize(0)
    with pytest.raises(ValueError):
        factorize(1 << 64)


def test_factorize_roundtrip_first_100k():
    bad = [n for n in range(1, 100_001) if prod(p**e for p, e in factorize(n)) != n]
    assert bad == []


def test_factorize_primes_are_prime():
    sieve = set(primes_up_to(100_000))
    bad = [n for n in range(1, 100_001) if any(p not in sieve for p, _ in factorize(n))]
    assert bad == []


def test_is_prime_large_known_values():
    assert is_prime(2**61 - 1) and is_prime(2**31 - 1)
    assert not is_prime(3_215_031_751)  # strong pseudoprime to bases 2, 3, 5, 7
    assert not is_prime(2**64 - 59 - 2)


def test_factorization_invariants_enforced():
    with pytest.raises(ValueError):
        Factorization(12, ((2, 2), (5, 1)))
    with pytest.raises(ValueError):
        Factorization(15, ((5, 1), (3, 1)))


def test_is_prime_agrees_with_sieve():
    sieve = set(primes_up_to(20_000))
    assert all(is_prime(n) == (n in sieve) for n in range(20_001))


@pytest.mark.parametrize("n, s, t", [(1, 0, 1), (12, 2, 3), (6830208, 7, 53361)])
def test_two_adic_split(n, s, t):
    split = two_adic_split(n)
    assert (split.s, split.t) == (s, t)


@given(st.integers(1, 10**12), st.integers(1, 10**12))
def test_two_adic_valuation_is_additive(a, b):
    assert two_adic_split(a * b).s == two_adic_split(a).s + two_adic_split(b).s
    assert two_adic_split(a).t % 2 == 1


def test_two_adic_split_rejects_zero():
    with pytest.raises(ValueError):
        two_adic_split(0)


@pytest.mark.parametrize("base, m, order", [(2, 9, 6), (2, 7, 3), (1, 13, 1), (1, 2, 1), (2, 53361, 2310)])
def test_multiplicative_order_examples(base, m, order):
    assert multiplicative_order(base, m).order == order


def test_multiplicative_order_brute_force():
    for m in range(2, 400):
        phi = euler_phi(factorize(m))
        for b in range(1, m):
            if gcd(b, m) != 1:
                continue
            e = multiplicative_order(b, m).order
            assert pow(b, e, m) == 1
            assert all(pow(b, j, m) != 1 for j in range(1, e))
            assert phi % e == 0


def test_multiplicative_order_needs_unit():
    with pytest.raises(ValueError):
        multiplicative_order(3, 9)


@pytest.mark.parametrize(
    "pairs, expected",
    [([(1, 1)], (0, 1)), ([(5, 8), (3, 9)], (21, 72)), ([(7, 8), (5, 9)], (23, 72))],
)
def test_crt_examples(pairs, expected):
    assert crt_combine(pairs) == expected


@given(st.lists(st.sampled_from([4, 9, 25, 7, 11, 13, 17, 19, 23]), min_size=1, max_size=5, unique=True), st.data())
def test_crt_inverts_reduction(moduli, data):
    residues = [data.draw(st.integers(0, m - 1)) for m in moduli]
    x, big = crt_combine(list(zip(residues, moduli)))
    assert big == prod(moduli)
    assert [x % m for m in moduli] == residues


def test_crt_rejects_shared_factor():
    with pytest.raises(ValueError):
        crt_combine([(1, 6), (1, 4)])
