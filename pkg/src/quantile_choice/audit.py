"""Exhaustive unilateral-deviation search shared by all mechanism auditors."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Hashable, Iterable, Optional, Sequence

from .core import Preference


class DomainTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class Verdict:
    """Outcome of a property check; truthy iff the property holds."""

    ok: bool
    detail: object = None

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class Deviation:
    """A profitable misreport: ``agent`` reports ``report`` instead of the truth."""

    profile: tuple[Preference, ...]
    agent: int
    report: Preference
    truthful_rank: int
    deviating_rank: int


@dataclass(frozen=True)
class AuditResult:
    counterexample: Optional[object]
    profiles_checked: int
    cases_checked: int

    @property
    def passed(self) -> bool:
        return self.counterexample is None


def all_preferences(m: int) -> list[Preference]:
    return [Preference(p) for p in itertools.permutations(range(m))]


def count_profiles(sizes: Sequence[int]) -> int:
    """Number of profiles when agent ``k`` ranks ``sizes[k]`` options."""
    return math.prod(math.factorial(s) for s in sizes)


def all_profiles(sizes: Sequence[int]) -> Iterable[tuple[Preference, ...]]:
    prefs = {s: all_preferences(s) for s in set(sizes)}
    return itertools.product(*(prefs[s] for s in sizes))


def guard_domain(size: int, max_domain: Optional[int]) -> None:
    if max_domain is not None and size > max_domain:
        raise DomainTooLarge(f"domain has {size} profiles, above the limit of {max_domain}")


def deviation_search(
    profiles: Iterable[tuple[Preference, ...]],
    outcome: Callable[[tuple[Preference, ...]], object],
    rank_of: Callable[[object, int, Preference], int],
    agents: Optional[Sequence[int]] = None,
) -> AuditResult:
    """Scan profiles for a unilateral misreport that helps the deviator.

    ``outcome(profile)`` runs the mechanism; ``rank_of(result, agent, pref)``
    is the rank, under ``pref``, of ``agent``'s representative in ``result``.
    Outcomes are memoised per profile because deviations revisit profiles.
    """
    cache: dict[Hashable, object] = {}

    def run(p):
        if p not in cache:
            cache[p] = outcome(p)
        return cache[p]

    n_prof = n_cases = 0
    for profile in profiles:
        profile = tuple(profile)
        n_prof += 1
        truthful = run(profile)
        for agent in agents if agents is not None else range(len(profile)):
            truth = profile[agent]
            base = rank_of(truthful, agent, truth)
            if base == 1:
                continue
            for report in all_preferences(len(truth)):
                if report == truth:
                    continue
                n_cases += 1
                dev = profile[:agent] + (report,) + profile[agent + 1:]
                r = rank_of(run(dev), agent, truth)
                if r < base:
                    return AuditResult(Deviation(profile, agent, report, base, r), n_prof, n_cases)
    return AuditResult(None, n_prof, n_cases)
