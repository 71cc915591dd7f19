"""Exact big-integer foundations: rising sequences, Eulerian rows, binomials.

Everything in this module is exact integer arithmetic. Probabilities never
appear here; they live in :mod:`riffle.laws` as ``fractions.Fraction`` values
built on top of these counts.
"""

from __future__ import annotations

import math
import os
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

__all__ = [
    "CACHE_ENV_VAR",
    "DISK_CACHE_MIN_N",
    "EulerianCache",
    "EulerianRow",
    "binomial_big",
    "default_cache",
    "eulerian_row",
    "factorial",
    "rising_sequences",
    "validate_arrangement",
]

CACHE_ENV_VAR = "RIFFLE_CACHE_DIR"

#: Rows with n below this are cheap to recompute and are kept in memory only.
DISK_CACHE_MIN_N = 32


def factorial(n: int) -> int:
    """Exact n! for n >= 0."""
    if n < 0:
        raise ValueError(f"factorial undefined for n={n}")
    return math.factorial(n)


def binomial_big(top: int, n: int) -> int:
    """Exact binomial coefficient C(top, n).

    ``top`` may be a very large integer (thousands of bits); ``n`` must be a
    nonnegative machine-scale integer. Returns 0 when ``top < n``.
    """
    if n < 0:
        raise ValueError(f"lower index must be >= 0, got {n}")
    if top < 0:
        raise ValueError(f"upper argument must be >= 0, got {top}")
    return math.comb(top, n)


def validate_arrangement(arrangement: Sequence[int]) -> tuple[int, ...]:
    """Check that ``arrangement`` lists each card value 1..n exactly once.

    Returns the arrangement as a tuple. Raises ``ValueError`` for duplicate,
    missing, or out-of-range values.
    """
    deck = tuple(int(v) for v in arrangement)
    n = len(deck)
    if n == 0:
        raise ValueError("empty arrangement")
    seen = [False] * n
    for v in deck:
        if not 1 <= v <= n:
            raise ValueError(f"card value {v} out of range 1..{n}")
        if seen[v - 1]:
            raise ValueError(f"duplicate card value {v}")
        seen[v - 1] = True
    return deck


def rising_sequences(arrangement: Sequence[int]) -> int:
    """Number of rising sequences of a deck arrangement.

    A rising sequence is a maximal run of consecutive card values that appear
    in left-to-right order in the arrangement. Equivalently, the value ``v+1``
    starts a new sequence exactly when it sits to the left of ``v``, so the
    count is one plus the number of descents of the inverse permutation. The
    equivalence with the run-based definition is exercised by brute force in
    the test suite for all decks up to n = 6.

    >>> rising_sequences((3, 1, 4, 5, 7, 2, 8, 9, 6))
    3
    """
    deck = validate_arrangement(arrangement)
    n = len(deck)
    pos = [0] * n
    for i, v in enumerate(deck):
        pos[v - 1] = i
    breaks = sum(1 for v in range(1, n) if pos[v] < pos[v - 1])
    return 1 + breaks


@dataclass(frozen=True)
class EulerianRow:
    """Counts of n-card arrangements by number of rising sequences.

    ``counts[i]`` holds the number of arrangements with ``r = i + 1`` rising
    sequences; use :meth:`count` to stay in the 1-based r convention. Rows are
    validated on construction: they sum to n! and are symmetric.
    """

    n: int
    counts: tuple[int, ...]

    def __post_init__(self) -> None:
        n = self.n
        if n < 1:
            raise ValueError(f"deck size must be >= 1, got {n}")
        if len(self.counts) != n:
            raise ValueError(f"row must have {n} entries, got {len(self.counts)}")
        if sum(self.counts) != factorial(n):
            raise ValueError(f"row for n={n} does not sum to n!")
        for r in range(1, n + 1):
            if self.counts[r - 1] != self.counts[n - r]:
                raise ValueError(f"row for n={n} is not symmetric at r={r}")
        if self.counts[0] != 1 or self.counts[-1] != 1:
            raise ValueError(f"row for n={n} must have 1 at both ends")

    def count(self, r: int) -> int:
        """Number of arrangements with exactly ``r`` rising sequences."""
        if not 1 <= r <= self.n:
            raise ValueError(f"r must be in 1..{self.n}, got {r}")
        return self.counts[r - 1]

    def r_values(self) -> range:
        return range(1, self.n + 1)


def _next_row(prev: list[int], n: int) -> list[int]:
    # counts_n[r] = r * counts_{n-1}[r] + (n - r + 1) * counts_{n-1}[r - 1]
    row = [0] * n
    row[0] = 1
    for r in range(2, n + 1):
        below = prev[r - 1] if r <= n - 1 else 0
        row[r - 1] = r * below + (n - r + 1) * prev[r - 2]
    return row


class EulerianCache:
    """On-disk store of Eulerian rows, one row per file.

    File format: ``eulerian_<n>.txt`` holding decimal integers, one per line;
    the first line is n and line i+1 is the count for r = i. Writes go through
    a temp file and an atomic rename, so concurrent readers always see a
    complete row (single-writer, multi-reader contract).
    """

    def __init__(self, directory: str | os.PathLike[str]):
        self.directory = Path(directory)

    def path_for(self, n: int) -> Path:
        return self.directory / f"eulerian_{n}.txt"

    def read(self, n: int) -> EulerianRow | None:
        path = self.path_for(n)
        try:
            text = path.read_text()
        except OSError:
            return None
        try:
            lines = text.split()
            if int(lines[0]) != n or len(lines) != n + 1:
                return None
            counts = tuple(int(s) for s in lines[1:])
            return EulerianRow(n, counts)
        except (ValueError, IndexError):
            # Corrupt cache entry; caller recomputes and overwrites.
            return None

    def write(self, row: EulerianRow) -> None:
        self.directory.mkdir(parents=True, exist_ok=True)
        path = self.path_for(row.n)
        tmp = path.with_name(f".{path.name}.{os.getpid()}.tmp")
        body = "\n".join([str(row.n), *(str(c) for c in row.counts)]) + "\n"
        tmp.write_text(body)
        os.replace(tmp, path)


def default_cache() -> EulerianCache:
    """Cache rooted at ``$RIFFLE_CACHE_DIR``, defaulting to ``./cache``."""
    return EulerianCache(os.environ.get(CACHE_ENV_VAR, "cache"))


_memo: dict[int, EulerianRow] = {}
_memo_lock = threading.Lock()


def eulerian_row(n: int, cache: EulerianCache | None = None) -> EulerianRow:
    """Eulerian row for deck size n, computed by the two-term recurrence.

    Rows are memoized in memory for the process lifetime. Rows with
    ``n >= DISK_CACHE_MIN_N`` are also persisted to the on-disk cache, since
    recomputation dominates runtime once n reaches the hundreds and distance
    profiles reuse the same row across many shuffle counts.
    """
    if n < 1:
        raise ValueError(f"deck size must be >= 1, got {n}")
    with _memo_lock:
        hit = _memo.get(n)
    if hit is not None:
        return hit

    if cache is None:
        cache = default_cache()
    if n >= DISK_CACHE_MIN_N:
        row = cache.read(n)
        if row is not None:
            with _memo_lock:
                _memo[n] = row
            return row

    with _memo_lock:
        start = max((k for k in _memo if k < n), default=1)
        prev = list(_memo[start].counts) if start in _memo else [1]
    for k in range(start + 1, n + 1):
        prev = _next_row(prev, k)
    row = EulerianRow(n, tuple(prev) if n > 1 else (1,))
    with _memo_lock:
        _memo[n] = row
    if n >= DISK_CACHE_MIN_N:
        cache.write(row)
    return row


def brute_force_row(n: int) -> EulerianRow:
    """Row computed by enumerating all n! arrangements. Test oracle; n <= 9."""
    if n > 9:
        raise ValueError("brute force row limited to n <= 9")
    from itertools import permutations

    counts = [0] * n
    for deck in permutations(range(1, n + 1)):
        counts[rising_sequences(deck) - 1] += 1
    return EulerianRow(n, tuple(counts))
