"""Randomized voting rules under quantile utilities, and their auditors.

A rule is any callable ``rule(prefs, h) -> Lottery``; ``h`` is the fixed
quantile vector of the domain, which rules may read or ignore.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence

from .audit import AuditResult, Verdict, all_profiles, count_profiles, deviation_search, guard_domain
from .core import ONE, ZERO, Lottery, Preference, check_quantile, rep_rank
from .feasibility import lp_feasible_voting, rank_bound

Rule = Callable[[Sequence[Preference], Sequence[Fraction]], Lottery]


@dataclass(frozen=True)
class VotingInstance:
    prefs: tuple[Preference, ...]
    h: tuple[Fraction, ...]

    def __post_init__(self):
        prefs = tuple(self.prefs)
        h = tuple(check_quantile(v) for v in self.h)
        if not prefs:
            raise ValueError("instance has no agents")
        if len(h) != len(prefs):
            raise ValueError(f"{len(prefs)} preferences but {len(h)} quantiles")
        m = len(prefs[0])
        if any(len(p) != m for p in prefs):
            raise ValueError("preferences rank different numbers of alternatives")
        object.__setattr__(self, "prefs", prefs)
        object.__setattr__(self, "h", h)

    @property
    def n(self) -> int:
        return len(self.prefs)

    @property
    def m(self) -> int:
        return len(self.prefs[0])


def h_grid() -> list[Fraction]:
    """Audit quantiles: every k/12 plus the regime boundaries 1/3, 1/2, 2/3."""
    return sorted({Fraction(k, 12) for k in range(13)} | {Fraction(1, 3), Fraction(1, 2), Fraction(2, 3)})


def rep_ranks(x: Lottery, inst: VotingInstance) -> tuple[int, ...]:
    return tuple(rep_rank(x, p, h) for p, h in zip(inst.prefs, inst.h))


def is_efficient_lottery(x: Lottery, inst: VotingInstance) -> Verdict:
    """Pareto efficiency of ``x``; detail is a dominating lottery if one exists.

    Keeping every agent at her current representative rank or better while
    pushing one agent a rank higher is a system of prefix lower bounds, so
    each candidate improvement is a single feasibility query.
    """
    ranks = rep_ranks(x, inst)
    for star in range(inst.n):
        if ranks[star] == 1:
            continue
        cons = []
        for i, (p, h) in enumerate(zip(inst.prefs, inst.h)):
            r = ranks[i] - 1 if i == star else ranks[i]
            cons.append(rank_bound(p.prefix(r), h))
        y = lp_feasible_voting(inst.m, cons)
        if y is not None:
            return Verdict(False, y)
    return Verdict(True)


def universally_efficient_lottery(prefs: Sequence[Preference]) -> Optional[Lottery]:
    """The lottery efficient for every quantile vector, when one exists.

    One exists exactly when all agents share a top alternative; it is the
    deterministic lottery on that alternative.
    """
    tops = {p.top for p in prefs}
    if len(tops) != 1:
        return None
    return Lottery.deterministic(len(prefs[0]), tops.pop())


def plurality_scores(prefs: Sequence[Preference]) -> list[int]:
    scores = [0] * len(prefs[0])
    for p in prefs:
        scores[p.top] += 1
    return scores


def _by_score(prefs: Sequence[Preference]) -> list[int]:
    """Alternatives by descending plurality score, ties to the lower id."""
    scores = plurality_scores(prefs)
    return sorted(range(len(scores)), key=lambda a: (-scores[a], a))


def r_plurality_literal(prefs: Sequence[Preference], h: Sequence[Fraction]) -> Lottery:
    """``1 - min h`` over the winner's supporters, applied even when that is 0.

    Kept for comparison: when every supporter has ``h == 1`` it hands the
    winner nothing and its supporters lose their top alternative.
    """
    if len(prefs[0]) != 2:
        raise ValueError("R-plurality is defined for exactly two alternatives")
    winner = _by_score(prefs)[0]
    p_win = ONE - min(h[i] for i, p in enumerate(prefs) if p.top == winner)
    probs = [ZERO, ZERO]
    probs[winner] = p_win
    probs[1 - winner] = ONE - p_win
    return Lottery(probs)


def r_plurality(prefs: Sequence[Preference], h: Sequence[Fraction]) -> Lottery:
    """Two alternatives: the plurality winner gets one minus the smallest
    quantile among its supporters, the loser the rest.

    If all supporters have ``h == 1`` they only need the winner to be
    possible.  The winner then gets the smallest positive quantile among the
    loser's supporters (1/2 if there is none), which keeps every such
    supporter on her own top alternative.
    """
    if len(prefs[0]) != 2:
        raise ValueError("R-plurality is defined for exactly two alternatives")
    winner = _by_score(prefs)[0]
    p_win = ONE - min(h[i] for i, p in enumerate(prefs) if p.top == winner)
    if p_win == 0:
        p_win = min([h[i] for i, p in enumerate(prefs) if p.top != winner and 0 < h[i] < 1], default=Fraction(1, 2))
    probs = [ZERO, ZERO]
    probs[winner] = p_win
    probs[1 - winner] = ONE - p_win
    return Lottery(probs)


def top2_half_rule(prefs: Sequence[Preference], h: Sequence[Fraction]) -> Lottery:
    """Three alternatives: half on each of the two highest plurality scores."""
    if len(prefs[0]) != 3:
        raise ValueError("top-two rule is defined for exactly three alternatives")
    first, second, _ = _by_score(prefs)
    probs = [ZERO] * 3
    probs[first] = probs[second] = Fraction(1, 2)
    return Lottery(probs)


def uniform_rule(prefs: Sequence[Preference], h: Sequence[Fraction]) -> Lottery:
    return Lottery.uniform(len(prefs[0]))


def dictatorship_rule(dictator: int) -> Rule:
    def rule(prefs, h):
        return Lottery.deterministic(len(prefs[0]), prefs[dictator].top)

    rule.__name__ = f"dictatorship_{dictator}"
    return rule


def constant_rule(lottery: Lottery) -> Rule:
    def rule(prefs, h):
        return lottery

    return rule


@dataclass(frozen=True)
class MonotonicityViolation:
    profile: tuple[Preference, ...]
    agent: int
    before: Fraction
    after: Fraction


def is_monotone(rule: Rule, n: int, h: Sequence[Fraction]) -> Optional[MonotonicityViolation]:
    """First case where an agent moving alternative 0 down raises its probability.

    Scans every two-alternative profile over ``n`` agents and every agent with
    ``0 > 1`` who flips to ``1 > 0``.  Returns None for monotone rules.
    """
    h = tuple(h)
    ab, ba = Preference((0, 1)), Preference((1, 0))
    for profile in all_profiles([2] * n):
        before = rule(profile, h)[0]
        for i, p in enumerate(profile):
            if p != ab:
                continue
            flipped = profile[:i] + (ba,) + profile[i + 1:]
            after = rule(flipped, h)[0]
            if after > before:
                return MonotonicityViolation(profile, i, before, after)
    return None


def destabilising_quantile(v: MonotonicityViolation) -> Fraction:
    """Quantile for the flipping agent that turns a monotonicity violation into
    a profitable misreport: halfway between the two probabilities of alternative 0."""
    return ONE - (v.before + v.after) / 2


def _domain(n: int, m: int, profiles, max_domain):
    if profiles is None:
        guard_domain(count_profiles([m] * n), max_domain)
        return all_profiles([m] * n)
    return profiles


def strategyproofness_audit(
    rule: Rule,
    n: int,
    m: int,
    h: Sequence[Fraction],
    profiles: Optional[Iterable[Sequence[Preference]]] = None,
    max_domain: Optional[int] = None,
) -> AuditResult:
    """Exhaustive search for a profitable unilateral misreport."""
    h = tuple(Fraction(v) for v in h)
    if len(h) != n:
        raise ValueError("quantile vector length differs from n")
    return deviation_search(
        _domain(n, m, profiles, max_domain),
        lambda prof: rule(prof, h),
        lambda x, agent, pref: rep_rank(x, pref, h[agent]),
    )


@dataclass(frozen=True)
class InefficientOutcome:
    profile: tuple[Preference, ...]
    lottery: Lottery
    dominating: Lottery


def efficiency_audit(
    rule: Rule,
    n: int,
    m: int,
    h: Sequence[Fraction],
    profiles: Optional[Iterable[Sequence[Preference]]] = None,
    max_domain: Optional[int] = None,
) -> AuditResult:
    """Check the rule's lottery for efficiency on every profile of the domain."""
    h = tuple(Fraction(v) for v in h)
    checked = 0
    for profile in _domain(n, m, profiles, max_domain):
        profile = tuple(profile)
        checked += 1
        x = rule(profile, h)
        v = is_efficient_lottery(x, VotingInstance(profile, h))
        if not v:
            return AuditResult(InefficientOutcome(profile, x, v.detail), checked, checked)
    return AuditResult(None, checked, checked)
