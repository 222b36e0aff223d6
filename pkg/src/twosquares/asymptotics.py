"""Extremal density sequences for r(S_n) and r(N_n).

``density_point(i, s)`` tracks r(N_n) for n = (p_1 p_2 ... p_i)^s where p_j
runs over the primes congruent to 3 mod 4.  As s grows each factor's
density tends to 1/(p_j + 1), so the sequence approaches
1 - prod(1 - 1/(p_j + 1)) from below.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import count as _count
from math import prod

from .arithmetic import is_prime
from .residues import count_prime_power

__all__ = [
    "DensitySequencePoint",
    "primes_3mod4",
    "density_point",
    "limit_value",
    "sequence_s_full",
]

U64_MAX = (1 << 64) - 1


@dataclass(frozen=True)
class DensitySequencePoint:
    i: int
    s: int
    primes: tuple[int, ...]
    modulus: int | None  # None when n(i, s) does not fit in 64 bits
    density_N: Fraction
    limit_value: Fraction

    @property
    def overflow(self) -> bool:
        return self.modulus is None


def primes_3mod4(count: int) -> list[int]:
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    out: list[int] = []
    for q in _count(3, 4):
        if is_prime(q):
            out.append(q)
            if len(out) == count:
                return out
    raise AssertionError("unreachable")


def limit_value(primes: list[int] | tuple[int, ...]) -> Fraction:
    return 1 - prod((1 - Fraction(1, p + 1) for p in primes), start=Fraction(1))


def density_point(i: int, s: int) -> DensitySequencePoint:
    if i < 1 or s < 1:
        raise ValueError(f"need i, s >= 1, got i={i}, s={s}")
    primes = tuple(primes_3mod4(i))
    survive = Fraction(1)
    for p in primes:
        survive *= 1 - count_prime_power(p, s).density_N
    n = prod(p**s for p in primes)
    return DensitySequencePoint(
        i=i,
        s=s,
        primes=primes,
        modulus=n if n <= U64_MAX else None,
        density_N=1 - survive,
        limit_value=limit_value(primes),
    )


def sequence_s_full(k: int) -> Fraction:
    """r(S_{5^k}); identically 1 because 5 is 1 mod 4."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    return count_prime_power(5, k).density_S
