"""Exact shuffle distributions on rising-sequence classes.

A deck law here is always constant on rising-sequence classes, so it is
represented by the probability of each *single arrangement* in class r (not
the class mass). All arithmetic is exact rational; floats only appear when a
caller explicitly renders a value.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple

from .combinatorics import EulerianRow, binomial_big, eulerian_row, factorial

__all__ = [
    "PackDistribution",
    "ProductLaw",
    "RisingSeqLaw",
    "SizeGuardError",
    "WindowGap",
    "inverse_square_pack",
    "law_after_k",
    "law_from_json",
    "law_to_json",
    "m_shuffle_law",
    "product_power",
    "tail_set_gap",
    "tv_to_uniform",
    "window_set_gap",
]

_MAX_PRODUCT_ATOMS_ENV = "RIFFLE_MAX_PRODUCT_ATOMS"


class SizeGuardError(RuntimeError):
    """Raised when an exact computation would exceed its configured size."""


def _default_max_atoms() -> int:
    raw = os.environ.get(_MAX_PRODUCT_ATOMS_ENV)
    return int(raw) if raw else 1_000_000


@dataclass(frozen=True)
class RisingSeqLaw:
    """Probability law on deck arrangements, constant on rising-seq classes.

    ``class_prob[i]`` is the probability of each individual arrangement with
    ``r = i + 1`` rising sequences. Construction verifies exact normalization
    (sum over classes of count * prob equals 1) and that the per-arrangement
    probability is nonincreasing in r, which holds for every m-shuffle law and
    every mixture of them.
    """

    n: int
    class_prob: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        n = self.n
        if len(self.class_prob) != n:
            raise ValueError(f"law for n={n} needs {n} class entries")
        row = eulerian_row(n)
        total = Fraction(0)
        prev = None
        for r in range(1, n + 1):
            q = self.class_prob[r - 1]
            if q < 0 or q > 1:
                raise ValueError(f"class probability out of [0,1] at r={r}")
            if prev is not None and q > prev:
                raise ValueError(f"class probability increases at r={r}")
            prev = q
            total += row.count(r) * q
        if total != 1:
            raise ValueError(f"law for n={n} has total mass {total}, not 1")

    def prob(self, r: int) -> Fraction:
        """Probability of one arrangement with r rising sequences."""
        if not 1 <= r <= self.n:
            raise ValueError(f"r must be in 1..{self.n}, got {r}")
        return self.class_prob[r - 1]

    def class_mass(self, r: int) -> Fraction:
        """Total probability of the class of arrangements with r rising seqs."""
        return eulerian_row(self.n).count(r) * self.prob(r)

    def row(self) -> EulerianRow:
        return eulerian_row(self.n)


def m_shuffle_law(n: int, m: int) -> RisingSeqLaw:
    """Exact law of the deck after one m-shuffle of the ordered deck.

    The probability of any arrangement with r rising sequences is
    ``C(n + m - r, n) / m**n``; it vanishes for r > m. ``m`` may be a huge
    integer (compositions of many shuffles are a single ``prod(m_i)``-shuffle).
    """
    if n < 1:
        raise ValueError(f"deck size must be >= 1, got {n}")
    if m < 1:
        raise ValueError(f"pack count must be >= 1, got {m}")
    den = m**n
    probs = tuple(
        Fraction(binomial_big(n + m - r, n), den) for r in range(1, n + 1)
    )
    return RisingSeqLaw(n, probs)


class PackDistribution:
    """Finite-support distribution of the random number of packs m.

    Probabilities are exact, sum to exactly 1, and the support values are
    distinct integers >= 1. ``discarded_mass`` records the tail removed by
    :meth:`truncated`; it is metadata only and does not enter the atoms.
    """

    __slots__ = ("atoms", "discarded_mass")

    def __init__(
        self,
        atoms: Iterable[tuple[int, Fraction]],
        discarded_mass: Fraction = Fraction(0),
    ):
        pairs = sorted(((int(m), Fraction(p)) for m, p in atoms))
        if not pairs:
            raise ValueError("pack distribution needs at least one atom")
        seen: set[int] = set()
        total = Fraction(0)
        for m, p in pairs:
            if m < 1:
                raise ValueError(f"pack count must be >= 1, got {m}")
            if m in seen:
                raise ValueError(f"duplicate pack count {m}")
            if p < 0 or p > 1:
                raise ValueError(f"probability out of [0,1] for m={m}")
            seen.add(m)
            total += p
        if total != 1:
            raise ValueError(f"pack probabilities sum to {total}, not 1")
        self.atoms: tuple[tuple[int, Fraction], ...] = tuple(
            (m, p) for m, p in pairs if p > 0
        )
        self.discarded_mass = Fraction(discarded_mass)

    @classmethod
    def delta(cls, m: int) -> "PackDistribution":
        """Deterministic pack count m."""
        return cls([(m, Fraction(1))])

    @classmethod
    def from_pairs(cls, pairs: dict[int, Fraction | int]) -> "PackDistribution":
        return cls([(m, Fraction(p)) for m, p in pairs.items()])

    @classmethod
    def truncated(
        cls,
        pairs: Iterable[tuple[int, Fraction]],
        tail_bound: Fraction,
    ) -> "PackDistribution":
        """Truncate-and-renormalize a (possibly infinite) sequence of atoms.

        Atoms are consumed until the remaining mass is at most ``tail_bound``;
        the retained atoms are renormalized to total mass 1 and the removed
        mass is recorded in ``discarded_mass``.
        """
        tail_bound = Fraction(tail_bound)
        if not 0 < tail_bound < 1:
            raise ValueError("tail bound must be in (0, 1)")
        kept: list[tuple[int, Fraction]] = []
        mass = Fraction(0)
        for m, p in pairs:
            kept.append((m, Fraction(p)))
            mass += p
            if 1 - mass <= tail_bound:
                break
        else:
            raise ValueError("atom stream exhausted before reaching tail bound")
        discarded = 1 - mass
        return cls([(m, p / mass) for m, p in kept], discarded_mass=discarded)

    def prob_of(self, m: int) -> Fraction:
        for mm, p in self.atoms:
            if mm == m:
                return p
        return Fraction(0)

    def support(self) -> tuple[int, ...]:
        return tuple(m for m, _ in self.atoms)

    def is_single_atom(self) -> bool:
        return len(self.atoms) == 1

    def __repr__(self) -> str:
        inner = ", ".join(f"{m}: {p}" for m, p in self.atoms)
        return f"PackDistribution({{{inner}}})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PackDistribution):
            return NotImplemented
        return self.atoms == other.atoms

    def __hash__(self) -> int:
        return hash(self.atoms)


def inverse_square_pack(n: int) -> PackDistribution:
    """Pack counts ``floor(e**i)`` weighted proportionally to ``1/i**2``.

    The support runs over i = 1..floor(log n), so the law depends on the deck
    size. Its log pack count has slowly growing mean and much faster growing
    variance, which makes it the standard stress case for the condition
    checkers in :mod:`riffle.cutoff`.
    """
    top = int(math.floor(math.log(n)))
    if top < 1:
        raise ValueError(f"deck size {n} too small for this family")
    weights = {_floor_exp(i): Fraction(1, i * i) for i in range(1, top + 1)}
    norm = sum(weights.values())
    return PackDistribution([(m, w / norm) for m, w in weights.items()])


def _floor_exp(i: int) -> int:
    # floor(e**i) computed safely for any i via Decimal.
    from decimal import Decimal, getcontext

    ctx = getcontext().copy()
    ctx.prec = max(30, int(i * 0.45) + 20)
    return int(ctx.exp(Decimal(i)))


@dataclass(frozen=True)
class ProductLaw:
    """Exact law of the product of i.i.d. pack counts, keyed by product value."""

    atoms: dict[int, Fraction]

    def __post_init__(self) -> None:
        total = Fraction(0)
        for v, p in self.atoms.items():
            if v < 1:
                raise ValueError(f"product value must be >= 1, got {v}")
            if p < 0:
                raise ValueError(f"negative probability for product {v}")
            total += p
        if total != 1:
            raise ValueError(f"product law has total mass {total}, not 1")

    def items(self) -> list[tuple[int, Fraction]]:
        return sorted(self.atoms.items())


def product_power(
    p: PackDistribution, k: int, max_atoms: int | None = None
) -> ProductLaw:
    """Law of the product of k independent draws from p.

    Colliding products (2*6 = 3*4) are merged. If the number of distinct
    products would exceed ``max_atoms`` the computation fails with
    :class:`SizeGuardError` rather than degrade silently.
    """
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    if max_atoms is None:
        max_atoms = _default_max_atoms()
    acc: dict[int, Fraction] = {1: Fraction(1)}
    for _ in range(k):
        nxt: dict[int, Fraction] = {}
        for v, w in acc.items():
            for m, q in p.atoms:
                key = v * m
                if key in nxt:
                    nxt[key] += w * q
                else:
                    nxt[key] = w * q
                    if len(nxt) > max_atoms:
                        raise SizeGuardError(
                            f"product law would exceed {max_atoms} atoms"
                        )
        acc = nxt
    return ProductLaw(acc)


def law_after_k(
    n: int, p: PackDistribution, k: int, max_atoms: int | None = None
) -> RisingSeqLaw:
    """Exact deck law after k successive p-shuffles of the ordered deck.

    k independent p-shuffles compose into a single shuffle with the product
    pack count, so the law is the product-law mixture of m-shuffle laws.
    """
    products = product_power(p, k, max_atoms=max_atoms)
    return mixture_of_m_shuffles(n, products.items())


def mixture_of_m_shuffles(
    n: int, weighted_ms: Iterable[tuple[int, Fraction]]
) -> RisingSeqLaw:
    """Mixture sum(w * m_shuffle_law(n, m)) for exact weights w summing to 1."""
    probs = [Fraction(0)] * n
    for m, w in weighted_ms:
        if w == 0:
            continue
        law = m_shuffle_law(n, m)
        for i in range(n):
            probs[i] += w * law.class_prob[i]
    return RisingSeqLaw(n, tuple(probs))


def tv_to_uniform(law: RisingSeqLaw) -> Fraction:
    """Exact total variation distance between the law and the uniform deck.

    Because the law is constant on rising-sequence classes this is a sum over
    the n classes, weighted by the Eulerian counts.
    """
    n = law.n
    row = eulerian_row(n)
    u = Fraction(1, factorial(n))
    total = Fraction(0)
    for r in range(1, n + 1):
        total += row.count(r) * abs(law.prob(r) - u)
    return total / 2


def tail_set_gap(n: int, m: int, r: int) -> Fraction:
    """Uniform-minus-shuffle probability of the upper tail set of classes.

    The set is all arrangements with at least ``r`` rising sequences; the
    returned signed rational is nonnegative for every m-shuffle.
    """
    if not 1 <= r <= n:
        raise ValueError(f"r must be in 1..{n}, got {r}")
    law = m_shuffle_law(n, m)
    row = eulerian_row(n)
    u = Fraction(1, factorial(n))
    gap = Fraction(0)
    for s in range(r, n + 1):
        gap += row.count(s) * (u - law.prob(s))
    return gap


class WindowGap(NamedTuple):
    gap: Fraction
    empty: bool


def window_set_gap(n: int, m: int, k: int) -> WindowGap:
    """Uniform-minus-k-shuffle mass of the high-r window defined by (n, m).

    The window collects classes with r in ``[n/2 - sqrt(n)/(24c) + n**(1/4), n]``
    where ``c = m * n**(-3/2)``; the law evaluated on it is the k-shuffle law,
    which lets callers scan the infimum over k <= m. An empty window (lower
    bound beyond n) yields gap 0 with the ``empty`` flag set.
    """
    if m < 1 or k < 1:
        raise ValueError("pack counts must be >= 1")
    c = m * n ** (-1.5)
    lower = n / 2 - math.sqrt(n) / (24 * c) + n**0.25
    r_min = max(1, math.ceil(lower))
    if r_min > n:
        return WindowGap(Fraction(0), True)
    law = m_shuffle_law(n, k)
    row = eulerian_row(n)
    u = Fraction(1, factorial(n))
    gap = Fraction(0)
    for s in range(r_min, n + 1):
        gap += row.count(s) * (u - law.prob(s))
    return WindowGap(gap, False)


def law_to_json(law: RisingSeqLaw) -> str:
    """Serialize a law with exact decimal-string fields (never floats)."""
    row = eulerian_row(law.n)
    entries = [
        {
            "r": r,
            "count": str(row.count(r)),
            "prob_num": str(law.prob(r).numerator),
            "prob_den": str(law.prob(r).denominator),
        }
        for r in range(1, law.n + 1)
    ]
    return json.dumps({"n": law.n, "entries": entries}, separators=(",", ":"))


def law_from_json(text: str) -> RisingSeqLaw:
    data = json.loads(text)
    n = int(data["n"])
    probs = [Fraction(0)] * n
    for entry in data["entries"]:
        probs[int(entry["r"]) - 1] = Fraction(
            int(entry["prob_num"]), int(entry["prob_den"])
        )
    return RisingSeqLaw(n, tuple(probs))
