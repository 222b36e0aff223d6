"""Integer utilities: factorization, 2-adic splitting, multiplicative order, CRT."""

from __future__ import annotations

import threading
from dataclasses import dataclass
from math import gcd, isqrt, prod

import numpy as np

__all__ = [
    "Factorization",
    "TwoAdicSplit",
    "OrderValue",
    "primes_up_to",
    "is_prime",
    "factorize",
    "two_adic_split",
    "euler_phi",
    "divisors",
    "multiplicative_order",
    "crt_combine",
]

MAX_FACTOR_INPUT = 1 << 64

# (bound, bases): Miller-Rabin with these bases is exact for n < bound.
_MR_TIERS = (
    (2_152_302_898_747, (2, 3, 5, 7, 11)),
    (341_550_071_728_321, (2, 3, 5, 7, 11, 13, 17)),
    (3_825_123_056_546_413_051, (2, 3, 5, 7, 11, 13, 17, 19, 23)),
    (318_665_857_834_031_151_167_461, (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)),
)
_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
# below this, trial division finishes faster than a primality test
_MR_THRESHOLD = 1 << 20


@dataclass(frozen=True)
class Factorization:
    value: int
    factors: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        if prod(p**e for p, e in self.factors) != self.value:
            raise ValueError(f"factors {self.factors} do not multiply to {self.value}")
        primes = [p for p, _ in self.factors]
        if primes != sorted(set(primes)):
            raise ValueError("primes must be strictly increasing")
        if any(e < 1 for _, e in self.factors):
            raise ValueError("exponents must be >= 1")

    def __iter__(self):
        return iter(self.factors)

    def __len__(self) -> int:
        return len(self.factors)

    def prime_powers(self) -> list[int]:
        return [p**e for p, e in self.factors]

    def __str__(self) -> str:
        if not self.factors:
            return "1"
        return " * ".join(f"{p}^{e}" if e > 1 else str(p) for p, e in self.factors)


@dataclass(frozen=True)
class TwoAdicSplit:
    s: int
    t: int


@dataclass(frozen=True)
class OrderValue:
    base: int
    modulus: int
    order: int


class _PrimeTable:
    """Lazily grown table of small odd primes, shared across threads."""

    def __init__(self, initial: int = 1 << 12) -> None:
        self._lock = threading.Lock()
        self._limit = 1
        self._primes: tuple[int, ...] = ()
        self.ensure(initial)

    def ensure(self, limit: int) -> tuple[int, ...]:
        if limit <= self._limit:
            return self._primes
        with self._lock:
            if limit > self._limit:
                new_limit = max(limit, 2 * self._limit)
                self._primes = tuple(int(p) for p in _sieve(new_limit)[1:])
                self._limit = new_limit
        return self._primes


def _sieve(limit: int) -> np.ndarray:
    if limit < 2:
        return np.array([], dtype=np.int64)
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    flags[4::2] = False
    for p in range(3, isqrt(limit) + 1, 2):
        if flags[p]:
            flags[p * p :: 2 * p] = False
    return np.flatnonzero(flags)


_PRIMES = _PrimeTable()


def primes_up_to(limit: int) -> list[int]:
    """All primes p <= limit in increasing order."""
    if limit < 2:
        return []
    return [int(p) for p in _sieve(limit)]


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    if n < 41 * 41:
        return True
    bases = next((b for bound, b in _MR_TIERS if n < bound), _MR_TIERS[-1][1])
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in bases:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def factorize(n: int) -> Factorization:
    """Factor ``n`` by trial division, stopping early once the cofactor is prime.

    >>> factorize(72).factors
    ((2, 3), (3, 2))
    """
    if n < 1:
        raise ValueError(f"cannot factor {n}; need n >= 1")
    if n >= MAX_FACTOR_INPUT:
        raise ValueError(f"{n} exceeds the 64-bit factoring range")
    factors: list[tuple[int, int]] = []
    rest = n
    s = (rest & -rest).bit_length() - 1
    if s:
        factors.append((2, s))
        rest >>= s
    if rest > 1 and not (rest > _MR_THRESHOLD and is_prime(rest)):
        for p in _PRIMES.ensure(isqrt(rest)):
            if p * p > rest:
                break
            if rest % p == 0:
                e = 0
                while rest % p == 0:
                    rest //= p
                    e += 1
                factors.append((p, e))
                if rest > _MR_THRESHOLD and is_prime(rest):
                    break
    if rest > 1:
        factors.append((rest, 1))
    return Factorization(n, tuple(factors))


def two_adic_split(n: int) -> TwoAdicSplit:
    if n < 1:
        raise ValueError(f"two_adic_split needs n >= 1, got {n}")
    s = (n & -n).bit_length() - 1
    return TwoAdicSplit(s=s, t=n >> s)


def euler_phi(f: Factorization) -> int:
    return prod((p - 1) * p ** (e - 1) for p, e in f)


def divisors(f: Factorization) -> list[int]:
    divs = [1]
    for p, e in f:
        divs = [d * p**j for d in divs for j in range(e + 1)]
    return sorted(divs)


def multiplicative_order(base: int, modulus: int) -> OrderValue:
    """Least e >= 1 with base**e == 1 (mod modulus).

    Walks down from the totient, stripping one prime at a time while the
    power stays at 1.
    """
    if modulus < 1:
        raise ValueError(f"modulus must be positive, got {modulus}")
    if gcd(base, modulus) != 1:
        raise ValueError(f"gcd({base}, {modulus}) != 1; order undefined")
    if modulus == 1:
        return OrderValue(base, modulus, 1)
    order = euler_phi(factorize(modulus))
    for p, _ in factorize(order):
        while order % p == 0 and pow(base, order // p, modulus) == 1:
            order //= p
    return OrderValue(base, modulus, order)


def crt_combine(residues: list[tuple[int, int]]) -> tuple[int, int]:
    """Combine ``(residue, modulus)`` pairs with pairwise coprime moduli.

    Returns ``(x, M)`` with ``M`` the product of the moduli and ``0 <= x < M``.
    """
    x, big_m = 0, 1
    for r, m in residues:
        if m < 1:
            raise ValueError(f"modulus must be positive, got {m}")
        if gcd(big_m, m) != 1:
            raise ValueError(f"modulus {m} is not coprime to the others")
        # x + big_m * h == r (mod m)
        h = (r - x) * pow(big_m, -1, m) % m if m > 1 else 0
        x += big_m * h
        big_m *= m
    return x % big_m, big_m
