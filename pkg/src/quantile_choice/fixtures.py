"""Named instances and lotteries used by tests, audits and the CLI."""

from __future__ import annotations

from fractions import Fraction
from typing import Callable

from .core import ONE, ZERO, Lottery, Preference
from .feasibility import MatchingLottery
from .io import ONE_SIDED, TWO_SIDED, VOTING, Document
from .one_sided import OneSidedInstance
from .two_sided import TwoSidedInstance
from .voting import VotingInstance

THIRD, HALF = Fraction(1, 3), Fraction(1, 2)


def _p(*order: int) -> Preference:
    return Preference(order)


def psd_counterexample() -> Document:
    """Three agents, items a, b, c; agents 2 and 3 share b > c > a with h = 1/3."""
    inst = OneSidedInstance((_p(0, 1, 2), _p(1, 2, 0), _p(1, 2, 0)), (ZERO, THIRD, THIRD))
    return Document(ONE_SIDED, inst, ("1", "2", "3"), ("a", "b", "c"))


def psd_misreport() -> Preference:
    """Agent 3's profitable report a > b > c in the PSD counterexample."""
    return _p(0, 1, 2)


def psd_expected_lottery() -> MatchingLottery:
    t = 2 * THIRD
    return MatchingLottery([[ONE, ZERO, ZERO], [ZERO, t, THIRD], [ZERO, THIRD, t]])


def stable_support_instance() -> Document:
    """Both men rank w2 first; w1 prefers m1 and w2 prefers m2; all h = 1/2."""
    inst = TwoSidedInstance((_p(1, 0), _p(1, 0)), (_p(0, 1), _p(1, 0)), (HALF, HALF), (HALF, HALF))
    return Document(TWO_SIDED, inst, ("m1", "m2"), ("w1", "w2"))


def stable_support_lottery() -> MatchingLottery:
    """Stable at h = 1/2 yet mixes in the unstable matching m1-w2, m2-w1."""
    t = 2 * THIRD
    return MatchingLottery([[t, THIRD], [THIRD, t]])


def common_favourite_instance() -> Document:
    """Everyone ranks w1 or m1 first; half-DA is not efficient here."""
    inst = TwoSidedInstance((_p(0, 1), _p(0, 1)), (_p(0, 1), _p(0, 1)), (HALF, HALF), (HALF, HALF))
    return Document(TWO_SIDED, inst, ("m1", "m2"), ("w1", "w2"))


def half_da_dominated_instance() -> Document:
    """Unique stable matching m1-w3, m2-w2, m3-w1 at h = 1/2, yet DR-dominated.

    :func:`half_da_dominating_lottery` keeps every representative distinct and
    lifts m2 to w1 and m3 to w2 without hurting anyone.
    """
    inst = TwoSidedInstance(
        (_p(0, 1, 2), _p(0, 1, 2), _p(1, 0, 2)),
        (_p(2, 0, 1), _p(1, 0, 2), _p(1, 2, 0)),
        (HALF,) * 3,
        (HALF,) * 3,
    )
    return Document(TWO_SIDED, inst, ("m1", "m2", "m3"), ("w1", "w2", "w3"))


def half_da_dominating_lottery() -> MatchingLottery:
    return MatchingLottery([[ZERO, ZERO, ONE], [HALF, HALF, ZERO], [HALF, HALF, ZERO]])


def two_voter_profiles() -> dict[str, tuple[Preference, Preference]]:
    """Two voters over a, b, c: the profiles linking dictatorship for 1/3 <= h < 1/2.

    The key ``"jk"`` pairs voter 1's ``j``-th and voter 2's ``k``-th preference:
    voter 1 has a > c > b or a > b > c, voter 2 has b > c > a or b > a > c.
    """
    v1 = {"1": _p(0, 2, 1), "2": _p(0, 1, 2)}
    v2 = {"1": _p(1, 2, 0), "2": _p(1, 0, 2)}
    return {j + k: (v1[j], v2[k]) for j in "12" for k in "12"}


def two_voter_instance(key: str = "11", h: Fraction = Fraction(2, 5)) -> Document:
    inst = VotingInstance(two_voter_profiles()[key], (h, h))
    return Document(VOTING, inst, ("1", "2"), ("a", "b", "c"))


def anti_monotone_rule(prefs, h) -> Lottery:
    """Two alternatives: all mass on alternative 0 iff voter 0 ranks 1 above 0."""
    if prefs[0].top == 1:
        return Lottery((ONE, ZERO))
    return Lottery((ZERO, ONE))


FIXTURES: dict[str, Callable[[], Document]] = {
    "psd-counterexample": psd_counterexample,
    "stable-support": stable_support_instance,
    "common-favourite": common_favourite_instance,
    "half-da-dominated": half_da_dominated_instance,
    "two-voters-11": lambda: two_voter_instance("11"),
    "two-voters-12": lambda: two_voter_instance("12"),
    "two-voters-21": lambda: two_voter_instance("21"),
    "two-voters-22": lambda: two_voter_instance("22"),
}
