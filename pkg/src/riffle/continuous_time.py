"""Continuous-time shuffling: Poisson-clock deck laws and their parameters.

The continuous chain performs p-shuffles at the arrival times of a unit-rate
Poisson process. Its deck law at time t is the Poisson-weighted mixture of
the discrete k-step laws; the mixture is truncated at a certified tail mass.
The unit-time view of the same chain is an ordinary p-shuffle for a modified
pack distribution, constructed here as well.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

from .combinatorics import eulerian_row, factorial
from .cutoff import log_moments, _fmt
from .laws import (
    PackDistribution,
    SizeGuardError,
    mixture_of_m_shuffles,
)

__all__ = [
    "ContinuousCutoffReport",
    "PoissonizedLaw",
    "PoissonizedTv",
    "UnitTimePackLaw",
    "continuous_cutoff_report",
    "poissonized_law",
    "unit_time_pack_law",
]

_MAX_POISSON_TERMS = 20_000


class PoissonizedTv(NamedTuple):
    exact: Fraction
    value: float
    certificate: float


@dataclass(frozen=True)
class PoissonizedLaw:
    """Deck law of the continuous-time chain at time t, tail-truncated.

    The Poisson weights are floats; each weight is mixed into the exact class
    probabilities at its exact dyadic value, in fixed ascending k order, so
    the truncated law itself is exact and runs are byte-reproducible. The only
    gap to the true time-t law is the discarded Poisson tail, whose mass is
    below the requested tolerance.
    """

    n: int
    t: float
    tol: float
    truncation_k: int
    class_prob: tuple[Fraction, ...]
    mass: Fraction
    weights: tuple[float, ...]

    @property
    def tail_mass_bound(self) -> float:
        return float(1 - self.mass)

    def prob(self, r: int) -> Fraction:
        if not 1 <= r <= self.n:
            raise ValueError(f"r must be in 1..{self.n}, got {r}")
        return self.class_prob[r - 1]

    def tv_to_uniform(self) -> PoissonizedTv:
        """TV distance to uniform of the truncated law, with certificate.

        The true time-t distance differs from the exact value by at most the
        discarded tail mass, hence by less than the stored tolerance.
        """
        row = eulerian_row(self.n)
        u = Fraction(1, factorial(self.n))
        total = Fraction(0)
        for r in range(1, self.n + 1):
            total += row.count(r) * abs(self.class_prob[r - 1] - u)
        exact = total / 2
        return PoissonizedTv(exact, float(exact), self.tol)

    def to_json_dict(self) -> dict:
        row = eulerian_row(self.n)
        entries = [
            {
                "r": r,
                "count": str(row.count(r)),
                "prob_num": str(self.class_prob[r - 1].numerator),
                "prob_den": str(self.class_prob[r - 1].denominator),
            }
            for r in range(1, self.n + 1)
        ]
        return {
            "n": self.n,
            "t": _fmt(self.t),
            "tol": _fmt(self.tol),
            "truncation_k": self.truncation_k,
            "entries": entries,
        }


def poissonized_law(
    n: int, p: PackDistribution, t: float, tol: float
) -> PoissonizedLaw:
    """Truncated deck law of the continuous-time p-shuffle chain at time t.

    The truncation point is the smallest K whose retained Poisson(t) mass
    exceeds 1 - tol, found by incremental summation of the exact values of
    the float weights; tighter truncation keeps the product laws small.
    """
    if t < 0:
        raise ValueError(f"time must be >= 0, got {t}")
    if not 0 < tol < 1:
        raise ValueError(f"tolerance must be in (0, 1), got {tol}")
    if t > 700:
        raise ValueError("time too large for float Poisson weights")

    tol_frac = Fraction(tol)
    probs = [Fraction(0)] * n
    weights: list[float] = []
    mass = Fraction(0)
    prod: dict[int, Fraction] = {1: Fraction(1)}
    weight = math.exp(-t)
    k = 0
    while True:
        weights.append(weight)
        w_exact = Fraction(weight)
        term = mixture_of_m_shuffles(n, sorted(prod.items()))
        for i in range(n):
            probs[i] += w_exact * term.class_prob[i]
        mass += w_exact
        if 1 - mass < tol_frac:
            break
        k += 1
        if k > _MAX_POISSON_TERMS:
            raise SizeGuardError("Poisson truncation did not converge")
        weight = weight * t / k
        nxt: dict[int, Fraction] = {}
        for v, w in prod.items():
            for m, q in p.atoms:
                key = v * m
                nxt[key] = nxt.get(key, Fraction(0)) + w * q
        prod = nxt

    if mass > 1:
        # Float weights can overshoot 1 by rounding; rescale exactly so the
        # mass certificate stays valid.
        probs = [q / mass for q in probs]
        mass = Fraction(1)
    return PoissonizedLaw(
        n=n,
        t=float(t),
        tol=float(tol),
        truncation_k=k,
        class_prob=tuple(probs),
        mass=mass,
        weights=tuple(weights),
    )


@dataclass(frozen=True)
class UnitTimePackLaw:
    """Pack distribution whose p-shuffle equals one unit of continuous time.

    Atom ``l`` carries the probability that the continuous chain performs a
    compound shuffle with total pack count l during one unit of time. The
    atom at l = 1 uses the closed form ``exp(-P(X != 1))``; atoms at l > 1
    come from the Poisson-weighted product laws, truncated at ``j_truncation``
    compound steps with ``discarded_mass`` left over.
    """

    atoms: dict[int, float]
    j_truncation: int
    discarded_mass: float

    def prob_of(self, l: int) -> float:
        return self.atoms.get(l, 0.0)

    def log_moments(self) -> tuple[float, float]:
        """Mean and variance of the log compound pack count.

        Up to the documented truncation error these equal ``mu`` and
        ``sigma^2 + mu^2`` of the underlying pack distribution.
        """
        pairs = [(math.log(l), w) for l, w in sorted(self.atoms.items())]
        mean = math.fsum(w * lg for lg, w in pairs)
        var = math.fsum(w * (lg - mean) ** 2 for lg, w in pairs)
        return mean, var


def unit_time_pack_law(p: PackDistribution, tol: float) -> UnitTimePackLaw:
    """Build the unit-time compound pack distribution for p.

    The compound-step sum is truncated at the smallest J whose discarded
    terms contribute less than ``tol`` to the mass *and* to the first two
    log moments combined, so the moment identities hold within a small
    multiple of tol. The product distribution inside each retained term is
    exact; a single float factor enters per atom at the end.
    """
    if not 0 < tol < 1:
        raise ValueError(f"tolerance must be in (0, 1), got {tol}")
    max_log = math.log(max(p.support()))
    e_inv = math.exp(-1.0)

    # Bound on the mass + mean + second-moment contribution of compound step
    # count j; the inverse factorial underflows harmlessly past j ~ 170.
    bounds = []
    inv_fact = 1.0
    for j in range(1, 200):
        inv_fact /= j
        big = j * max_log
        bounds.append(e_inv * (1.0 + big + big * big) * inv_fact)

    j_trunc = 0
    tail = math.fsum(bounds)
    while tail >= tol:
        j_trunc += 1
        if j_trunc >= len(bounds):
            raise SizeGuardError("compound-step truncation did not converge")
        tail -= bounds[j_trunc - 1]

    base: dict[int, Fraction] = {}
    prod: dict[int, Fraction] = {1: Fraction(1)}
    for j in range(1, j_trunc + 1):
        nxt: dict[int, Fraction] = {}
        for v, w in prod.items():
            for m, q in p.atoms:
                key = v * m
                nxt[key] = nxt.get(key, Fraction(0)) + w * q
        prod = nxt
        inv_jfact = Fraction(1, factorial(j))
        for l, w in prod.items():
            if l > 1:
                base[l] = base.get(l, Fraction(0)) + inv_jfact * w

    atoms = {l: e_inv * float(w) for l, w in sorted(base.items())}
    atoms[1] = math.exp(-float(1 - p.prob_of(1)))
    assert atoms[1] >= e_inv
    discarded = max(0.0, 1.0 - math.fsum(atoms.values()))
    return UnitTimePackLaw(atoms=atoms, j_truncation=j_trunc, discarded_mass=discarded)


@dataclass(frozen=True)
class ContinuousCutoffReport:
    """Cutoff parameters of the continuous-time chain at one deck size.

    ``criterion_value`` is ``log n / mu``; the continuous family has a cutoff
    exactly when this diverges along the deck-size sequence, which a single n
    cannot decide, so the value is reported for trend inspection. For a
    single-atom pack the window also takes the ``sqrt(t_n)`` form, exposed
    separately.
    """

    n: int
    mu: float
    sigma: float
    t_n: float
    b_n: float
    criterion_value: float
    single_atom: bool
    window_sqrt_tn: float | None

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "mu": _fmt(self.mu),
            "sigma": _fmt(self.sigma),
            "t_n": _fmt(self.t_n),
            "b_n": _fmt(self.b_n),
            "criterion_value": _fmt(self.criterion_value),
            "single_atom": self.single_atom,
            "window_sqrt_tn": None
            if self.window_sqrt_tn is None
            else _fmt(self.window_sqrt_tn),
        }


def continuous_cutoff_report(p: PackDistribution, n: int) -> ContinuousCutoffReport:
    """Continuous-time cutoff parameters for the p-shuffle chain at size n."""
    mu, sigma = log_moments(p)
    if mu <= 0:
        raise ValueError("pack distribution concentrated at 1 never mixes")
    log_n = math.log(n)
    t_n = 3 * log_n / (2 * mu)
    b_n = (1.0 / mu) * max((mu + sigma) * math.sqrt(log_n / mu), 1.0)
    single = p.is_single_atom()
    return ContinuousCutoffReport(
        n=n,
        mu=mu,
        sigma=sigma,
        t_n=t_n,
        b_n=b_n,
        criterion_value=log_n / mu,
        single_atom=single,
        window_sqrt_tn=math.sqrt(t_n) if single else None,
    )
