"""Brute-force ground truth used to validate the closed forms.

Nothing in here consults the prime-power theorems: residue sets come from
enumerating squares mod n, and the natural-number checks come either from
the Fermat/Euler factorization criterion or from direct a^2 + b^2 sieving.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import isqrt

import numpy as np

from .arithmetic import factorize

__all__ = [
    "ORACLE_CEILING",
    "ResidueSet",
    "enumerate_s",
    "enumerate_s_fft",
    "nat_is_two_squares",
    "nat_two_squares_plus_powers",
    "two_squares_table",
    "two_squares_plus_powers_table",
]

ORACLE_CEILING = 10**6
FFT_CEILING = 2 * 10**8


@dataclass(frozen=True, eq=False)
class ResidueSet:
    modulus: int
    members: np.ndarray  # bool, length modulus

    def __contains__(self, x: int) -> bool:
        return bool(self.members[x % self.modulus])

    def __len__(self) -> int:
        return int(self.members.sum())

    def elements(self) -> list[int]:
        return np.flatnonzero(self.members).tolist()

    def complement(self) -> list[int]:
        return np.flatnonzero(~self.members).tolist()


def enumerate_s(n: int, ceiling: int = ORACLE_CEILING) -> ResidueSet:
    """S_n by summing every pair of distinct squares mod n."""
    if n < 1:
        raise ValueError(f"modulus must be positive, got {n}")
    if n > ceiling:
        raise ValueError(f"modulus {n} above oracle ceiling {ceiling}")
    squares = np.unique(np.arange(n, dtype=np.int64) ** 2 % n)
    members = np.zeros(n, dtype=bool)
    for i, a in enumerate(squares):
        members[(a + squares) % n] = True
        if i % 64 == 63 and members.all():
            break
    return ResidueSet(n, members)


def enumerate_s_fft(n: int, ceiling: int = FFT_CEILING, block: int = 1 << 24) -> ResidueSet:
    """S_n by convolving the square indicator with itself.

    Every pair sum a^2 + b^2 is still counted, just via FFT.  The indicator
    is cut into blocks so that each product is a power-of-two linear
    convolution; results are folded back mod n.  Used for moduli too large
    for :func:`enumerate_s`.
    """
    if n < 1:
        raise ValueError(f"modulus must be positive, got {n}")
    if n > ceiling:
        raise ValueError(f"modulus {n} above FFT oracle ceiling {ceiling}")
    indicator = np.zeros(n, dtype=bool)
    for lo in range(0, n, 1 << 22):
        a = np.arange(lo, min(n, lo + (1 << 22)), dtype=np.int64)
        indicator[a * a % n] = True

    block = min(block, 1 << max(0, (n - 1).bit_length()))
    size = 2 * block
    starts = list(range(0, n, block))
    members = np.zeros(n, dtype=bool)

    def spectrum(lo: int) -> np.ndarray:
        return np.fft.rfft(indicator[lo : lo + block].astype(np.float64), size)

    for bi, lo_i in enumerate(starts):
        f_i = spectrum(lo_i)
        for lo_j in starts[bi:]:
            f_j = f_i if lo_j == lo_i else spectrum(lo_j)
            pairs = np.fft.irfft(f_i * f_j, size)
            # pair counts are integers; drift means the FFT lost precision
            drift = float(np.abs(pairs - np.rint(pairs)).max())
            if drift > 0.25:
                raise ArithmeticError(f"FFT rounding drift {drift} too large for n={n}")
            hit = np.flatnonzero(pairs > 0.5)
            members[(hit + lo_i + lo_j) % n] = True
    return ResidueSet(n, members)


def nat_is_two_squares(m: int) -> bool:
    """Fermat/Euler: no prime 3 mod 4 divides m to an odd power."""
    if m < 0:
        raise ValueError(f"need m >= 0, got {m}")
    if m == 0:
        return True
    return all(p % 4 != 3 or e % 2 == 0 for p, e in factorize(m))


def nat_two_squares_plus_powers(m: int, max_powers: int) -> bool:
    """m = a^2 + b^2 plus at most ``max_powers`` terms 2^i (i >= 0, repeats allowed)."""
    if max_powers not in (0, 1, 2):
        raise ValueError(f"max_powers must be 0, 1 or 2, got {max_powers}")
    if m < 0:
        raise ValueError(f"need m >= 0, got {m}")
    if nat_is_two_squares(m):
        return True
    powers = [1 << i for i in range(m.bit_length()) if 1 << i <= m]
    if max_powers >= 1 and any(nat_is_two_squares(m - a) for a in powers):
        return True
    if max_powers == 2:
        for i, a in enumerate(powers):
            for b in powers[i:]:
                if a + b > m:
                    break
                if nat_is_two_squares(m - a - b):
                    return True
    return False


def two_squares_table(limit: int) -> np.ndarray:
    """Boolean table over [0, limit]: True where the index is a^2 + b^2."""
    table = np.zeros(limit + 1, dtype=bool)
    for a in range(isqrt(limit) + 1):
        rest = limit - a * a
        if rest < a * a:
            break
        b = np.arange(a, isqrt(rest) + 1, dtype=np.int64)
        table[a * a + b * b] = True
    return table


def two_squares_plus_powers_table(limit: int, max_powers: int) -> np.ndarray:
    """Vectorised sweep of :func:`nat_two_squares_plus_powers` over [0, limit]."""
    if max_powers not in (0, 1, 2):
        raise ValueError(f"max_powers must be 0, 1 or 2, got {max_powers}")
    base = two_squares_table(limit)
    powers = [1 << i for i in range(limit.bit_length()) if 1 << i <= limit]
    out = base.copy()
    if max_powers >= 1:
        for a in powers:
            out[a:] |= base[: limit + 1 - a]
    if max_powers == 2:
        for i, a in enumerate(powers):
            for b in powers[i:]:
                if a + b > limit:
                    break
                out[a + b :] |= base[: limit + 1 - a - b]
    return out
