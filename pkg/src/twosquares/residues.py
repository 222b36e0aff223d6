"""Closed-form classification of residues mod n as sums of two squares.

S_n is the set of x in Z_n with x = a^2 + b^2 (mod n) for some a, b (zero
allowed) and N_n is its complement.  Everything here is derived from the
prime-power structure of n; nothing enumerates squares.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .arithmetic import Factorization, factorize, is_prime

__all__ = [
    "PrimeClass",
    "PrimePowerClass",
    "MembershipVerdict",
    "ClassCounts",
    "prime_power_class",
    "member_2k",
    "member_p1mod4",
    "member_p3mod4",
    "member_prime_power",
    "member",
    "count_prime_power",
    "count",
    "is_full_coverage",
    "local_s_table",
    "s_table",
]


class PrimeClass(enum.Enum):
    TWO = "2"
    ONE_MOD_4 = "1 mod 4"
    THREE_MOD_4 = "3 mod 4"


@dataclass(frozen=True)
class PrimePowerClass:
    tag: PrimeClass
    p: int
    k: int

    @property
    def modulus(self) -> int:
        return self.p**self.k

    def __str__(self) -> str:
        return f"{self.p}^{self.k}"


@dataclass(frozen=True)
class MembershipVerdict:
    modulus: int
    residue: int
    in_S: bool
    witness: PrimePowerClass | None = None

    def __bool__(self) -> bool:
        return self.in_S

    def __str__(self) -> str:
        return "S" if self.in_S else f"N (fails at {self.witness})"


@dataclass(frozen=True)
class ClassCounts:
    modulus: int
    count_S: int
    count_N: int

    def __post_init__(self) -> None:
        if self.count_S + self.count_N != self.modulus:
            raise ValueError("count_S + count_N must equal the modulus")

    @property
    def density_S(self) -> Fraction:
        return Fraction(self.count_S, self.modulus)

    @property
    def density_N(self) -> Fraction:
        return Fraction(self.count_N, self.modulus)


@lru_cache(maxsize=4096)
def prime_power_class(p: int, k: int) -> PrimePowerClass:
    if k < 1:
        raise ValueError(f"exponent must be >= 1, got {k}")
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if p == 2:
        tag = PrimeClass.TWO
    elif p % 4 == 1:
        tag = PrimeClass.ONE_MOD_4
    else:
        tag = PrimeClass.THREE_MOD_4
    return PrimePowerClass(tag, p, k)


def _check_residue(x: int, modulus: int) -> None:
    if not 0 <= x < modulus:
        raise ValueError(f"residue {x} not in [0, {modulus})")


def member_2k(k: int, x: int) -> bool:
    """x in S_{2^k}: zero, or odd part congruent to 1 mod 4.  S_2 is all of Z_2."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    _check_residue(x, 1 << k)
    if k == 1 or x == 0:
        return True
    t = x >> ((x & -x).bit_length() - 1)
    return t % 4 == 1


def member_p1mod4(p: int, k: int, x: int) -> bool:
    if p % 4 != 1:
        raise ValueError(f"{p} is not congruent to 1 mod 4")
    _check_residue(x, p**k)
    return True


def member_p3mod4(p: int, k: int, x: int) -> bool:
    """x in S_{p^k} for p = 3 mod 4: zero, or even p-adic valuation."""
    if p % 4 != 3:
        raise ValueError(f"{p} is not congruent to 3 mod 4")
    _check_residue(x, p**k)
    if x == 0:
        return True
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v % 2 == 0


def member_prime_power(cls: PrimePowerClass, x: int) -> bool:
    if cls.tag is PrimeClass.TWO:
        return member_2k(cls.k, x)
    if cls.tag is PrimeClass.ONE_MOD_4:
        return member_p1mod4(cls.p, cls.k, x)
    return member_p3mod4(cls.p, cls.k, x)


def member(n: int, x: int, f: Factorization | None = None) -> MembershipVerdict:
    """Decide x in S_n componentwise over the prime powers of n."""
    _check_residue(x, n)
    if f is None:
        f = factorize(n)
    for p, k in f:
        cls = prime_power_class(p, k)
        if not member_prime_power(cls, x % cls.modulus):
            return MembershipVerdict(n, x, False, cls)
    return MembershipVerdict(n, x, True)


def count_prime_power(p: int, k: int) -> ClassCounts:
    cls = prime_power_class(p, k)
    q = p**k
    if cls.tag is PrimeClass.TWO:
        count_n = 0 if k == 1 else 2 ** (k - 1) - 1
    elif cls.tag is PrimeClass.ONE_MOD_4:
        count_n = 0
    elif k % 2 == 0:
        count_n = (q - 1) // (p + 1)
    else:
        count_n = (q - p) // (p + 1)
    return ClassCounts(q, q - count_n, count_n)


def count(n: int, f: Factorization | None = None) -> ClassCounts:
    """|S_n| as the product of the prime-power counts."""
    if f is None:
        f = factorize(n)
    count_s = 1
    for p, k in f:
        count_s *= count_prime_power(p, k).count_S
    return ClassCounts(n, count_s, n - count_s)


def is_full_coverage(n: int, f: Factorization | None = None) -> bool:
    """True iff S_n = Z_n, i.e. every square prime factor of n is 1 mod 4."""
    if f is None:
        f = factorize(n)
    return all(p % 4 == 1 for p, k in f if k >= 2)


@lru_cache(maxsize=256)
def local_s_table(p: int, k: int) -> np.ndarray:
    """Boolean membership table of S_{p^k}, indexed by residue.

    Built from the same closed forms as the scalar tests.  Returned arrays
    are shared, so they are marked read-only.
    """
    cls = prime_power_class(p, k)
    q = cls.modulus
    table = np.ones(q, dtype=bool)
    if cls.tag is PrimeClass.TWO:
        # valuation s, odd part 3 mod 4  <=>  x in 3*2^s + 2^(s+2) Z
        for s in range(k - 1):
            table[3 << s :: 4 << s] = False
    elif cls.tag is PrimeClass.THREE_MOD_4:
        # overwrite in increasing valuation so each slot ends at its exact valuation
        for s in range(1, k):
            table[:: p**s] = s % 2 == 0
        table[0] = True
    table.flags.writeable = False
    return table


def s_table(f: Factorization) -> np.ndarray:
    """Boolean membership table of S_n over all of Z_n (n = f.value)."""
    n = f.value
    table = np.ones(n, dtype=bool)
    if n == 1:
        return table
    x = np.arange(n, dtype=np.int64)
    for p, k in f:
        if p % 4 == 1:
            continue
        table &= local_s_table(p, k)[x % p**k]
    return table
