"""One-sided matching: n agents, n items, lotteries over perfect matchings."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence

from .audit import AuditResult, Verdict, all_profiles, count_profiles, deviation_search, guard_domain
from .core import ONE, ZERO, Preference, check_quantile, rep_rank
from .feasibility import ROW, FeasibilityProblem, MatchingLottery, lp_feasible, min_rank_for_agent


@dataclass(frozen=True)
class OneSidedInstance:
    prefs: tuple[Preference, ...]
    h: tuple[Fraction, ...]

    def __post_init__(self):
        prefs = tuple(self.prefs)
        h = tuple(check_quantile(v) for v in self.h)
        n = len(prefs)
        if n == 0:
            raise ValueError("instance has no agents")
        if len(h) != n:
            raise ValueError(f"{n} preferences but {len(h)} quantiles")
        for i, p in enumerate(prefs):
            if len(p) != n:
                raise ValueError(f"agent {i} ranks {len(p)} items, expected {n}")
        object.__setattr__(self, "prefs", prefs)
        object.__setattr__(self, "h", h)

    @property
    def n(self) -> int:
        return len(self.prefs)

    def with_prefs(self, prefs: Sequence[Preference]) -> "OneSidedInstance":
        return OneSidedInstance(tuple(prefs), self.h)


@dataclass(frozen=True)
class MechanismOutcome:
    lottery: MatchingLottery
    rep_ranks: tuple[int, ...]
    log: tuple[str, ...] = ()


def rep_ranks(x: MatchingLottery, inst: OneSidedInstance) -> tuple[int, ...]:
    return tuple(rep_rank(x.row(i), inst.prefs[i], inst.h[i]) for i in range(inst.n))


def proportionality_floor(n: int, h: Fraction) -> int:
    """Largest representative rank a proportional lottery may give."""
    if h == 1:
        return 1
    return max(1, math.ceil(n * (1 - h)))


def complete_lottery(partial: Sequence[Sequence[Fraction]]) -> MatchingLottery:
    """Add nonnegative mass to ``partial`` until it is doubly stochastic.

    Row deficits ``r_i`` and column deficits ``c_j`` have the same total
    ``D``; cell ``(i, j)`` receives ``r_i * c_j / D``.  Cells of a full row or
    column are left untouched, an empty matrix becomes uniform.
    """
    rows = [[Fraction(v) for v in row] for row in partial]
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise ValueError("partial matrix must be square")
    if any(v < 0 for r in rows for v in r):
        raise ValueError("partial matrix has a negative entry")
    rdef = [ONE - sum(r) for r in rows]
    cdef = [ONE - sum(rows[i][j] for i in range(n)) for j in range(n)]
    if any(d < 0 for d in rdef + cdef):
        raise ValueError("partial matrix has a row or column sum above 1")
    total = sum(rdef)
    if total:
        for i in range(n):
            if rdef[i]:
                for j in range(n):
                    rows[i][j] += rdef[i] * cdef[j] / total
    return MatchingLottery(rows)


def top_choice_welfare(inst: OneSidedInstance) -> tuple[MechanismOutcome, int]:
    """A lottery maximising the number of agents whose representative is their top item.

    For each item, the agents ranking it first are packed in non-increasing
    order of quantile (ties by id) while their demands ``1 - h`` fit in one
    unit.  An agent with ``h == 1`` only needs positive mass, so she fits as
    long as the packed demand stays strictly below one; such agents share the
    leftover mass of the column equally.
    """
    n = inst.n
    partial = [[ZERO] * n for _ in range(n)]
    count = 0
    log = []
    for g in range(n):
        fans = [i for i in range(n) if inst.prefs[i].top == g]
        if not fans:
            continue
        certain = sorted((i for i in fans if inst.h[i] < 1), key=lambda i: (-inst.h[i], i))
        relaxed = [i for i in fans if inst.h[i] == 1]
        packed, load = [], ZERO
        for i in certain:
            need = ONE - inst.h[i]
            if load + need > 1 or (relaxed and load + need >= 1):
                break
            packed.append(i)
            load += need
        for i in packed:
            partial[i][g] = ONE - inst.h[i]
        for i in relaxed:
            partial[i][g] = (ONE - load) / len(relaxed)
        chosen = sorted(packed + relaxed)
        count += len(chosen)
        log.append(f"item {g}: packed agents {chosen}")
    x = complete_lottery(partial)
    return MechanismOutcome(x, rep_ranks(x, inst), tuple(log)), count


def serial_dictatorship(
    inst: OneSidedInstance, initial: Sequence[int], order: Optional[Sequence[int]] = None
) -> MechanismOutcome:
    """Fix each agent's best achievable representative rank in turn.

    Starts from the rank requirements ``initial``, which must be feasible.
    """
    n = inst.n
    order = list(range(n)) if order is None else list(order)
    if sorted(order) != list(range(n)):
        raise ValueError(f"order {order} is not a permutation of the agents")
    problem = FeasibilityProblem.from_ranks(inst.prefs, inst.h, initial)
    if lp_feasible(problem) is None:
        raise AssertionError(f"initial rank requirements {tuple(initial)} are infeasible")
    log = []
    for i in order:
        t = min_rank_for_agent(problem, i)
        problem = problem.with_rank(ROW, i, t)
        log.append(f"agent {i}: rank requirement {t}")
    x = lp_feasible(problem)
    ranks = rep_ranks(x, inst)
    final = tuple(problem.bound_for(ROW, i).rank for i in range(n))
    if ranks != final:
        raise AssertionError(f"witness ranks {ranks} differ from requirements {final}")
    return MechanismOutcome(x, ranks, tuple(log))


def sd_mechanism(inst: OneSidedInstance, order: Optional[Sequence[int]] = None) -> MechanismOutcome:
    return serial_dictatorship(inst, [inst.n] * inst.n, order)


def psd_mechanism(inst: OneSidedInstance, order: Optional[Sequence[int]] = None) -> MechanismOutcome:
    """Serial dictatorship restricted to proportional lotteries."""
    floors = [proportionality_floor(inst.n, h) for h in inst.h]
    return serial_dictatorship(inst, floors, order)


def proportionality_check(x: MatchingLottery, inst: OneSidedInstance) -> Verdict:
    """Holds iff every agent's representative rank is within her floor; detail lists violators."""
    ranks = rep_ranks(x, inst)
    bad = [i for i in range(inst.n) if ranks[i] > proportionality_floor(inst.n, inst.h[i])]
    return Verdict(not bad, bad)


def envy_free_check(x: MatchingLottery, inst: OneSidedInstance) -> Verdict:
    """Agent ``i`` envies ``j`` if she would rather hold row ``j`` than her own.

    Both rows are judged by ``i``'s preference and quantile.  Detail is the
    first envious pair ``(i, j)``.
    """
    for i in range(inst.n):
        p, h = inst.prefs[i], inst.h[i]
        own = rep_rank(x.row(i), p, h)
        for j in range(inst.n):
            if j != i and rep_rank(x.row(j), p, h) < own:
                return Verdict(False, (i, j))
    return Verdict(True)


def efficiency_check_one_sided(x: MatchingLottery, inst: OneSidedInstance) -> Verdict:
    """Pareto efficiency; detail is a dominating lottery when one exists."""
    ranks = rep_ranks(x, inst)
    for i in range(inst.n):
        if ranks[i] == 1:
            continue
        better = list(ranks)
        better[i] -= 1
        y = lp_feasible(FeasibilityProblem.from_ranks(inst.prefs, inst.h, better))
        if y is not None:
            return Verdict(False, y)
    return Verdict(True)


def one_sided_sp_audit(
    mechanism: Callable[[OneSidedInstance], MechanismOutcome],
    h: Sequence[Fraction],
    profiles: Optional[Iterable[Sequence[Preference]]] = None,
    max_domain: Optional[int] = None,
) -> AuditResult:
    """Search for a profitable unilateral misreport.

    Without ``profiles`` every profile over ``len(h)`` agents is scanned.
    The deviator's gain is measured by her true preference on the row the
    mechanism gives her.
    """
    h = tuple(Fraction(v) for v in h)
    n = len(h)
    if profiles is None:
        guard_domain(count_profiles([n] * n), max_domain)
        profiles = all_profiles([n] * n)

    def outcome(profile):
        return mechanism(OneSidedInstance(profile, h)).lottery

    def rank_of(x, agent, pref):
        return rep_rank(x.row(agent), pref, h[agent])

    return deviation_search(profiles, outcome, rank_of)
