"""Obstruction sets for sums of two squares plus powers of two.

Work modulo n = 2^k * m with m odd.  A residue x lands in the condition set
A when

1. x mod 2^k is in N_{2^k}, and
2. x - 2^i is in N_n for i = 0..k-1, and (two-power mode only)
3. x - 2^i - 2^j is in N_n for i = 0..k-1, j = i+1..ord_m(2).

Every natural congruent to a member of A is then not a sum of two squares
plus the allowed number of powers of two, so |A|/n is a density lower bound.

Evaluation splits x by CRT into (u, v) = (x mod 2^k, x mod m).  For a
shift s, x - s is in N_n iff u - s is in N_{2^k} or v - s is in N_m, so each
row u only needs to constrain v for the shifts where its 2-part lands in
S_{2^k}.  Rows are grouped by that requirement pattern and each pattern's
admissible v-set is computed once.
"""

from __future__ import annotations

import enum
import json
import logging
import os
import tempfile
from collections.abc import Callable, Iterator
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from pathlib import Path

import numpy as np

from .arithmetic import Factorization, factorize, multiplicative_order, primes_up_to
from .oracle import nat_two_squares_plus_powers
from .residues import local_s_table, member, member_2k, s_table

__all__ = [
    "Mode",
    "CandidateModulus",
    "ConditionSet",
    "SearchBest",
    "SearchReport",
    "LiftReport",
    "candidates",
    "condition_shifts",
    "condition_count",
    "condition_set",
    "condition_set_one_power",
    "condition_set_two_powers",
    "satisfies_conditions",
    "search",
    "certify_lift",
    "load_checkpoint",
    "save_checkpoint",
]

log = logging.getLogger(__name__)

CHECKPOINT_KIND = "twosquares.search-checkpoint"
CHECKPOINT_VERSION = 1


class Mode(enum.Enum):
    ONE_POWER = "one-power"
    TWO_POWERS = "two-powers"

    @property
    def max_powers(self) -> int:
        return 1 if self is Mode.ONE_POWER else 2


@dataclass(frozen=True)
class CandidateModulus:
    k: int
    m: int
    m_factorization: Factorization

    def __post_init__(self) -> None:
        if self.k < 2:
            raise ValueError(f"k must be >= 2, got {self.k}")
        if self.m % 2 == 0:
            raise ValueError(f"m must be odd, got {self.m}")
        if self.m_factorization.value != self.m:
            raise ValueError("factorization does not match m")
        for p, e in self.m_factorization:
            if p % 4 != 3 or e < 2:
                raise ValueError(f"m = {self.m} must be a square-full product of primes 3 mod 4")

    @classmethod
    def of(cls, k: int, m: int) -> CandidateModulus:
        return cls(k, m, factorize(m))

    @property
    def n(self) -> int:
        return self.m << self.k

    @property
    def factorization(self) -> Factorization:
        return Factorization(self.n, ((2, self.k),) + self.m_factorization.factors)

    def __str__(self) -> str:
        return f"n={self.n} (k={self.k}, m={self.m})"


@dataclass(frozen=True, eq=False)
class ConditionSet:
    candidate: CandidateModulus
    mode: Mode
    members: np.ndarray  # bool over Z_n
    count: int

    @property
    def density(self) -> Fraction:
        return Fraction(self.count, self.candidate.n)

    def __contains__(self, x: int) -> bool:
        return bool(self.members[x % self.candidate.n])

    def elements(self) -> np.ndarray:
        return np.flatnonzero(self.members)


def _odd_parts(limit: int) -> list[Factorization]:
    """Odd square-full m <= limit built only from primes 3 mod 4."""
    primes = [p for p in primes_up_to(isqrt(limit)) if p % 4 == 3]
    out: list[Factorization] = []

    def extend(start: int, value: int, factors: tuple[tuple[int, int], ...]) -> None:
        out.append(Factorization(value, factors))
        for idx in range(start, len(primes)):
            p = primes[idx]
            q = value * p * p
            if q > limit:
                break
            e = 2
            while q <= limit:
                extend(idx + 1, q, factors + ((p, e),))
                q *= p
                e += 1

    extend(0, 1, ())
    return out


def candidates(limit: int) -> Iterator[CandidateModulus]:
    """Candidate moduli n <= limit in increasing order of n.

    n = 2^k m with k >= 2 and m odd, square-full, and free of primes 1 mod 4.
    """
    if limit < 4:
        return
    found = []
    for f in _odd_parts(limit // 4):
        k = 2
        while f.value << k <= limit:
            found.append(CandidateModulus(k, f.value, f))
            k += 1
    found.sort(key=lambda c: c.n)
    yield from found


def condition_shifts(c: CandidateModulus, mode: Mode) -> list[int]:
    """Offsets s (reduced mod n) for which x - s must lie in N_n."""
    n = c.n
    shifts = [(1 << i) % n for i in range(c.k)]
    if mode is Mode.TWO_POWERS:
        # ord_1(2) is meaningless; fall back to the powers below 2^k
        top = multiplicative_order(2, c.m).order if c.m > 1 else c.k - 1
        pow2 = [pow(2, j, n) for j in range(top + 1)]
        for i in range(c.k):
            for j in range(i + 1, top + 1):
                shifts.append((pow2[i] + pow2[j]) % n)
    return sorted(set(shifts))


def _crt_idempotents(n2: int, m: int) -> tuple[int, int]:
    n = n2 * m
    e2 = m * pow(m, -1, n2) % n
    em = n2 * pow(n2, -1, m) % n if m > 1 else 0
    return e2, em


def _row_keys(req: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Group identical boolean rows; returns (unique rows, inverse, counts)."""
    packed = np.packbits(req, axis=1)
    width = packed.shape[1]
    if width <= 8:
        padded = np.zeros((packed.shape[0], 8), dtype=np.uint8)
        padded[:, :width] = packed
        keys = padded.view("<u8").ravel()
    else:
        keys = np.ascontiguousarray(packed).view(np.dtype((np.void, width))).ravel()
    _, first, inverse, counts = np.unique(
        keys, return_index=True, return_inverse=True, return_counts=True
    )
    return req[first], inverse.ravel(), counts


def _evaluate(
    c: CandidateModulus, mode: Mode, materialize: bool
) -> tuple[int, np.ndarray | None]:
    k, m, n = c.k, c.m, c.n
    n2 = 1 << k
    in_s2 = local_s_table(2, k)
    rows = np.flatnonzero(~in_s2)  # condition 1
    not_sm = ~s_table(c.m_factorization)

    shifts = np.array(condition_shifts(c, mode), dtype=np.int64)
    pairs = np.unique(np.stack([shifts % n2, shifts % m], axis=1), axis=0)
    cols, col_of = np.unique(pairs[:, 1], return_inverse=True)
    col_of = col_of.ravel()

    # req[r, j]: row r needs v - cols[j] in N_m
    req = np.zeros((rows.size, cols.size), dtype=bool)
    for (s2, _), j in zip(pairs.tolist(), col_of.tolist()):
        req[:, j] |= in_s2[(rows - s2) % n2]

    patterns, inverse, counts = _row_keys(req)
    members = np.zeros(n, dtype=bool) if materialize else None
    e2, em = _crt_idempotents(n2, m)
    total = 0
    for idx, pattern in enumerate(patterns):
        need = cols[pattern]
        if need.size == 0:
            v = np.arange(m, dtype=np.int64)
        else:
            v = np.flatnonzero(np.roll(not_sm, int(need[0])))
            for d in need[1:]:
                if v.size == 0:
                    break
                v = v[not_sm[(v - d) % m]]
        total += int(counts[idx]) * v.size
        if members is not None and v.size:
            u = rows[inverse == idx]
            x = (u[:, None] * e2 + v[None, :] * em) % n
            members[x.ravel()] = True
    return total, members


def condition_count(c: CandidateModulus, mode: Mode) -> int:
    """|A| without materialising the member table."""
    return _evaluate(c, mode, materialize=False)[0]


def condition_set(c: CandidateModulus, mode: Mode) -> ConditionSet:
    total, members = _evaluate(c, mode, materialize=True)
    return ConditionSet(c, mode, members, total)


def condition_set_one_power(c: CandidateModulus) -> ConditionSet:
    return condition_set(c, Mode.ONE_POWER)


def condition_set_two_powers(c: CandidateModulus) -> ConditionSet:
    return condition_set(c, Mode.TWO_POWERS)


def satisfies_conditions(x: int, c: CandidateModulus, mode: Mode) -> bool:
    """Scalar recheck of the conditions for one residue, via ``member``."""
    n = c.n
    x %= n
    if member_2k(c.k, x % (1 << c.k)):
        return False
    f = c.factorization
    return all(not member(n, (x - s) % n, f).in_S for s in condition_shifts(c, mode))


@dataclass(frozen=True)
class SearchBest:
    candidate: CandidateModulus
    count: int

    @property
    def density(self) -> Fraction:
        return Fraction(self.count, self.candidate.n)


@dataclass(frozen=True)
class SearchReport:
    limit: int
    mode: Mode
    best: SearchBest | None
    candidates_scanned: int
    cursor: int

    def rows(self) -> list[tuple[str, object]]:
        out: list[tuple[str, object]] = [
            ("mode", self.mode.value),
            ("limit", self.limit),
            ("candidates_scanned", self.candidates_scanned),
            ("cursor", self.cursor),
        ]
        if self.best is None:
            out.append(("best", "none"))
        else:
            b = self.best
            out += [
                ("n", b.candidate.n),
                ("k", b.candidate.k),
                ("m", b.candidate.m),
                ("m_factorization", str(b.candidate.m_factorization)),
                ("count", b.count),
                ("density", b.density),
            ]
        return out


def save_checkpoint(path: str | os.PathLike, report: SearchReport) -> None:
    """Write the search state atomically as a single JSON object."""
    best = None
    if report.best is not None:
        c = report.best.candidate
        best = {"n": c.n, "k": c.k, "m": c.m, "count": report.best.count}
    record = {
        "kind": CHECKPOINT_KIND,
        "version": CHECKPOINT_VERSION,
        "mode": report.mode.value,
        "limit": report.limit,
        "cursor": report.cursor,
        "candidates_scanned": report.candidates_scanned,
        "best": best,
    }
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            json.dump(record, fh, indent=2)
            fh.write("\n")
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def load_checkpoint(path: str | os.PathLike) -> SearchReport:
    with open(path) as fh:
        record = json.load(fh)
    if record.get("kind") != CHECKPOINT_KIND:
        raise ValueError(f"{path} is not a search checkpoint")
    if record.get("version") != CHECKPOINT_VERSION:
        raise ValueError(f"unsupported checkpoint version {record.get('version')}")
    best = record["best"]
    return SearchReport(
        limit=record["limit"],
        mode=Mode(record["mode"]),
        best=None if best is None else SearchBest(CandidateModulus.of(best["k"], best["m"]), best["count"]),
        candidates_scanned=record["candidates_scanned"],
        cursor=record["cursor"],
    )


def search(
    limit: int,
    mode: Mode = Mode.ONE_POWER,
    *,
    workers: int = 1,
    resume: SearchReport | None = None,
    checkpoint: str | os.PathLike | None = None,
    on_result: Callable[[CandidateModulus, int], None] | None = None,
) -> SearchReport:
    """Scan every candidate n <= limit and keep the densest condition set.

    Ties go to the smaller n.  Results are reduced in candidate order, so
    the report does not depend on ``workers``.  When ``checkpoint`` is set
    the state is rewritten after every candidate; pass the loaded state as
    ``resume`` to continue past its cursor.
    """
    if limit < 4:
        raise ValueError(f"limit must be >= 4, got {limit}")
    state = SearchReport(limit, mode, None, 0, 0)
    if resume is not None:
        if (resume.limit, resume.mode) != (limit, mode):
            raise ValueError(
                f"checkpoint is for limit={resume.limit} mode={resume.mode.value}, "
                f"not limit={limit} mode={mode.value}"
            )
        state = resume
    todo = [c for c in candidates(limit) if c.n > state.cursor]
    best, scanned = state.best, state.candidates_scanned

    def evaluate(c: CandidateModulus) -> int:
        return condition_count(c, mode)

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        for c, total in zip(todo, pool.map(evaluate, todo)):
            scanned += 1
            if total and (best is None or Fraction(total, c.n) > best.density):
                best = SearchBest(c, total)
                log.info("new best %s count=%d density=%.6f", c, total, total / c.n)
            state = SearchReport(limit, mode, best, scanned, c.n)
            if checkpoint is not None:
                save_checkpoint(checkpoint, state)
            if on_result is not None:
                on_result(c, total)
            log.debug("scanned %s count=%d", c, total)
    return state


@dataclass(frozen=True)
class LiftReport:
    x: int
    candidate: CandidateModulus
    mode: Mode
    samples: int
    counterexamples: tuple[int, ...]

    @property
    def ok(self) -> bool:
        return not self.counterexamples


def certify_lift(x: int, c: CandidateModulus, mode: Mode, samples: int) -> LiftReport:
    """Check naturals x + t*n, t < samples, against the natural-number oracle."""
    if samples < 1:
        raise ValueError(f"samples must be positive, got {samples}")
    if not satisfies_conditions(x, c, mode):
        raise ValueError(f"{x} is not in the {mode.value} condition set for {c}")
    n = c.n
    x %= n
    bad = tuple(
        x + t * n
        for t in range(samples)
        if nat_two_squares_plus_powers(x + t * n, mode.max_powers)
    )
    return LiftReport(x, c, mode, samples, bad)
