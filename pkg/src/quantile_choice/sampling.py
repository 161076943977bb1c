"""Seeded random instances and lotteries for audits and tests."""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Sequence

from .core import Lottery, Preference
from .feasibility import MatchingLottery
from .feasibility.problem import FeasibilityProblem, PrefixBound, COL, ROW
from .one_sided import OneSidedInstance
from .two_sided import TwoSidedInstance


def random_preference(rng: random.Random, m: int) -> Preference:
    order = list(range(m))
    rng.shuffle(order)
    return Preference(tuple(order))


def random_quantile(rng: random.Random, max_den: int = 12) -> Fraction:
    d = rng.randint(1, max_den)
    return Fraction(rng.randint(0, d), d)


def random_lottery(rng: random.Random, m: int, max_den: int = 12) -> Lottery:
    """Probabilities with a common denominator ``d <= max_den``: ``d`` units dropped into ``m`` bins."""
    d = rng.randint(1, max_den)
    counts = [0] * m
    for _ in range(d):
        counts[rng.randrange(m)] += 1
    return Lottery(tuple(Fraction(c, d) for c in counts))


def random_matching_lottery(rng: random.Random, n: int, terms: int = 3, max_den: int = 12) -> MatchingLottery:
    """Random convex combination of a few permutation matrices."""
    weights = list(random_lottery(rng, terms, max_den))
    rows = [[Fraction(0)] * n for _ in range(n)]
    for w in weights:
        perm = list(range(n))
        rng.shuffle(perm)
        for i, j in enumerate(perm):
            rows[i][j] += w
    return MatchingLottery(rows)


def random_one_sided(rng: random.Random, n: int, quantiles: Sequence[Fraction] = ()) -> OneSidedInstance:
    prefs = tuple(random_preference(rng, n) for _ in range(n))
    h = tuple(rng.choice(quantiles) if quantiles else random_quantile(rng) for _ in range(n))
    return OneSidedInstance(prefs, h)


def random_two_sided(rng: random.Random, n: int, quantiles: Sequence[Fraction] = ()) -> TwoSidedInstance:
    def q():
        return rng.choice(quantiles) if quantiles else random_quantile(rng)

    return TwoSidedInstance(
        tuple(random_preference(rng, n) for _ in range(n)),
        tuple(random_preference(rng, n) for _ in range(n)),
        tuple(q() for _ in range(n)),
        tuple(q() for _ in range(n)),
    )


def random_problem(rng: random.Random, n: int, two_sided: bool = False) -> FeasibilityProblem:
    """Random rank requirements, some agents left unconstrained."""
    bounds = []
    for side in (ROW, COL) if two_sided else (ROW,):
        for a in range(n):
            if rng.random() < 0.8:
                bounds.append(PrefixBound(side, a, random_preference(rng, n), rng.randint(1, n), random_quantile(rng, 6)))
    return FeasibilityProblem(n, tuple(bounds))
