"""Two-sided matching: stability, efficiency and mechanisms on lotteries.

Side N indexes the rows of a :class:`MatchingLottery`, side M the columns.
Agent ``i`` of N evaluates row ``i`` with her preference over M; agent ``j``
of M evaluates column ``j`` with her preference over N.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence

from .audit import AuditResult, Verdict, all_profiles, count_profiles, deviation_search, guard_domain
from .bmatching import max_weight_bmatching
from .core import ONE, ZERO, Preference, check_quantile, rep_rank, representative
from .feasibility import (
    COL,
    ROW,
    FeasibilityProblem,
    MassConstraint,
    MatchingLottery,
    lp_feasible,
    solve_constraints,
)
from .feasibility.problem import GE, GT, LE, LT
from .one_sided import complete_lottery

N_SIDE, M_SIDE = "N", "M"
DR_MAX_N = 4
EXACT_SEARCH_MAX_N = 4


@dataclass(frozen=True)
class TwoSidedInstance:
    n_prefs: tuple[Preference, ...]
    m_prefs: tuple[Preference, ...]
    n_h: tuple[Fraction, ...]
    m_h: tuple[Fraction, ...]

    def __post_init__(self):
        n_prefs, m_prefs = tuple(self.n_prefs), tuple(self.m_prefs)
        n_h = tuple(check_quantile(v) for v in self.n_h)
        m_h = tuple(check_quantile(v) for v in self.m_h)
        n = len(n_prefs)
        if n == 0:
            raise ValueError("instance has no agents")
        if len(m_prefs) != n or len(n_h) != n or len(m_h) != n:
            raise ValueError("both sides need n preferences and n quantiles")
        if any(len(p) != n for p in n_prefs + m_prefs):
            raise ValueError(f"every preference must rank {n} agents")
        object.__setattr__(self, "n_prefs", n_prefs)
        object.__setattr__(self, "m_prefs", m_prefs)
        object.__setattr__(self, "n_h", n_h)
        object.__setattr__(self, "m_h", m_h)

    @property
    def n(self) -> int:
        return len(self.n_prefs)

    @property
    def profile(self) -> tuple[Preference, ...]:
        """N preferences followed by M preferences."""
        return self.n_prefs + self.m_prefs

    def with_profile(self, profile: Sequence[Preference]) -> "TwoSidedInstance":
        n = self.n
        return TwoSidedInstance(tuple(profile[:n]), tuple(profile[n:]), self.n_h, self.m_h)

    def with_h(self, h) -> "TwoSidedInstance":
        """Same preferences, common quantile ``h`` for every agent."""
        return TwoSidedInstance(self.n_prefs, self.m_prefs, (h,) * self.n, (h,) * self.n)


def matching_lottery(perm: Sequence[int]) -> MatchingLottery:
    return MatchingLottery.from_permutation(perm)


def representatives(x: MatchingLottery, inst: TwoSidedInstance) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Partner representatives: for each N agent (an M index) and each M agent (an N index)."""
    n = inst.n
    rows = tuple(representative(x.row(i), inst.n_prefs[i], inst.n_h[i]) for i in range(n))
    cols = tuple(representative(x.col(j), inst.m_prefs[j], inst.m_h[j]) for j in range(n))
    return rows, cols


def representative_ranks(x: MatchingLottery, inst: TwoSidedInstance) -> tuple[tuple[int, ...], tuple[int, ...]]:
    rows, cols = representatives(x, inst)
    return (
        tuple(inst.n_prefs[i].rank(g) for i, g in enumerate(rows)),
        tuple(inst.m_prefs[j].rank(i) for j, i in enumerate(cols)),
    )


def deferred_acceptance(inst: TwoSidedInstance, proposing: str = N_SIDE) -> tuple[int, ...]:
    """Proposer-optimal stable matching, as a map N index -> M index.

    Free proposers propose in ascending id order, each to her best partner
    not yet rejecting her; receivers hold their best offer.
    """
    n = inst.n
    if proposing == N_SIDE:
        props, recvs = inst.n_prefs, inst.m_prefs
    elif proposing == M_SIDE:
        props, recvs = inst.m_prefs, inst.n_prefs
    else:
        raise ValueError(f"proposing side must be {N_SIDE!r} or {M_SIDE!r}")
    next_choice = [0] * n
    held: list[Optional[int]] = [None] * n  # receiver -> proposer
    free = list(range(n))
    while free:
        p = free.pop(0)
        r = props[p].order[next_choice[p]]
        next_choice[p] += 1
        cur = held[r]
        if cur is None:
            held[r] = p
        elif recvs[r].prefers(p, cur):
            held[r] = p
            free.append(cur)
        else:
            free.append(p)
        free.sort()
    if proposing == N_SIDE:
        match = [0] * n
        for r, p in enumerate(held):
            match[p] = r
        return tuple(match)
    return tuple(held)


def integral_blocking_pair(perm: Sequence[int], inst: TwoSidedInstance) -> Optional[tuple[int, int]]:
    n = inst.n
    partner_of_m = [0] * n
    for i, j in enumerate(perm):
        partner_of_m[j] = i
    for i in range(n):
        for j in range(n):
            if inst.n_prefs[i].prefers(j, perm[i]) and inst.m_prefs[j].prefers(i, partner_of_m[j]):
                return (i, j)
    return None


def stable_matchings(inst: TwoSidedInstance) -> list[tuple[int, ...]]:
    """Every integral stable matching, by enumeration of all n! matchings."""
    return [p for p in itertools.permutations(range(inst.n)) if integral_blocking_pair(p, inst) is None]


def half_da(inst: TwoSidedInstance) -> MatchingLottery:
    """Half weight on each side's proposer-optimal stable matching."""
    a = deferred_acceptance(inst, N_SIDE)
    b = deferred_acceptance(inst, M_SIDE)
    n = inst.n
    half = Fraction(1, 2)
    rows = [[ZERO] * n for _ in range(n)]
    for i in range(n):
        rows[i][a[i]] += half
        rows[i][b[i]] += half
    return MatchingLottery(rows)


def stability_check(x: MatchingLottery, inst: TwoSidedInstance) -> Verdict:
    """Stable iff no pair prefers each other to both representatives.

    Detail is the first blocking pair ``(i, j)`` scanning ``i`` then ``j``.
    """
    rows, cols = representatives(x, inst)
    n = inst.n
    for i in range(n):
        for j in range(n):
            if inst.n_prefs[i].prefers(j, rows[i]) and inst.m_prefs[j].prefers(i, cols[j]):
                return Verdict(False, (i, j))
    return Verdict(True)


def _perfect_matching(support: list[list[bool]]) -> Optional[list[int]]:
    n = len(support)
    match_col: list[Optional[int]] = [None] * n

    def augment(i, seen):
        for j in range(n):
            if support[i][j] and j not in seen:
                seen.add(j)
                if match_col[j] is None or augment(match_col[j], seen):
                    match_col[j] = i
                    return True
        return False

    for i in range(n):
        if not augment(i, set()):
            return None
    perm = [0] * n
    for j, i in enumerate(match_col):
        perm[i] = j
    return perm


def birkhoff_decompose(x: MatchingLottery) -> list[tuple[Fraction, tuple[int, ...]]]:
    """Exact convex decomposition of ``x`` into permutation matrices.

    Repeatedly takes a perfect matching inside the positive support and
    removes it with the smallest weight on its cells.
    """
    if not isinstance(x, MatchingLottery):
        x = MatchingLottery(x)
    n = x.n
    rest = [list(r) for r in x.rows()]
    terms = []
    remaining = ONE
    while remaining > 0:
        perm = _perfect_matching([[v > 0 for v in r] for r in rest])
        if perm is None:
            raise AssertionError("positive support has no perfect matching")
        w = min(rest[i][perm[i]] for i in range(n))
        for i in range(n):
            rest[i][perm[i]] -= w
        remaining -= w
        terms.append((w, tuple(perm)))
    return terms


def top_choice_count(x: MatchingLottery, inst: TwoSidedInstance) -> int:
    rows, cols = representatives(x, inst)
    return sum(rows[i] == inst.n_prefs[i].top for i in range(inst.n)) + sum(
        cols[j] == inst.m_prefs[j].top for j in range(inst.n)
    )


def top_choice_weights(inst: TwoSidedInstance) -> list[list[int]]:
    """Edge weight = number of endpoints for which the other endpoint is the top choice."""
    n = inst.n
    return [
        [int(inst.n_prefs[i].top == j) + int(inst.m_prefs[j].top == i) for j in range(n)] for i in range(n)
    ]


@dataclass(frozen=True)
class TopChoiceResult:
    lottery: MatchingLottery
    count: int
    edges: frozenset[tuple[int, int]]
    b: int
    exact: bool


def topchoice_bmatching(inst: TwoSidedInstance) -> tuple[MatchingLottery, int]:
    r = topchoice_bmatching_detail(inst)
    return r.lottery, r.count


def topchoice_bmatching_detail(inst: TwoSidedInstance) -> TopChoiceResult:
    """Lottery maximising the number of agents whose representative is their top choice.

    All agents must share one quantile ``h < 1``.  Each selected edge of a
    maximum-weight b-matching, ``b = floor(1 / (1 - h))``, gets ``1 - h`` and
    the rest of the mass goes to unselected cells.  When that is impossible
    for the b-matching found, other maximum-weight b-matchings are tried
    (for ``n <= EXACT_SEARCH_MAX_N``); failing that, selected cells absorb
    the surplus.
    """
    hs = set(inst.n_h) | set(inst.m_h)
    if len(hs) != 1:
        raise ValueError("top-choice b-matching needs a common quantile for all agents")
    h = hs.pop()
    if h == 1:
        raise ValueError("top-choice b-matching is undefined for h = 1")
    b = int(1 // (1 - h))
    weights = top_choice_weights(inst)
    edges = max_weight_bmatching(weights, b)
    best = sum(weights[i][j] for i, j in edges)
    x = exact_completion(inst.n, edges, ONE - h)
    if x is None and inst.n <= EXACT_SEARCH_MAX_N:
        for alt in optimal_bmatchings(weights, b, best):
            x = exact_completion(inst.n, alt, ONE - h)
            if x is not None:
                edges = alt
                break
    exact = x is not None
    if not exact:
        partial = [[ZERO] * inst.n for _ in range(inst.n)]
        for i, j in edges:
            partial[i][j] = ONE - h
        x = complete_lottery(partial)
    count = top_choice_count(x, inst)
    if count != best:
        raise AssertionError("top-choice count differs from the b-matching weight")
    return TopChoiceResult(x, count, frozenset(edges), b, exact)


def exact_completion(n: int, cells: Iterable[tuple[int, int]], mass: Fraction) -> Optional[MatchingLottery]:
    """Doubly stochastic matrix with exactly ``mass`` on each of ``cells``, or None."""
    cons = [MassConstraint(frozenset({c}), s, mass) for c in cells for s in (GE, LE)]
    return solve_constraints(n, cons)


def optimal_bmatchings(weights: Sequence[Sequence[int]], b: int, best: int) -> Iterable[frozenset]:
    """Every b-matching of total weight ``best``, zero-weight edges included."""
    n = len(weights)
    cells = [(i, j) for i in range(n) for j in range(n)]
    for mask in range(1 << len(cells)):
        chosen = [c for k, c in enumerate(cells) if mask >> k & 1]
        if sum(weights[i][j] for i, j in chosen) != best:
            continue
        rows = [0] * n
        cols = [0] * n
        for i, j in chosen:
            rows[i] += 1
            cols[j] += 1
        if max(rows) <= b and max(cols) <= b:
            yield frozenset(chosen)


def _problem(inst: TwoSidedInstance, row_r: Sequence[int], col_r: Sequence[int]) -> FeasibilityProblem:
    return FeasibilityProblem.from_ranks(inst.n_prefs, inst.n_h, row_r, inst.m_prefs, inst.m_h, col_r)


def efficiency_check_two_sided(x: MatchingLottery, inst: TwoSidedInstance) -> Verdict:
    """Pareto efficiency over both sides; detail is a dominating lottery."""
    rr, cr = representative_ranks(x, inst)
    for side, ranks in ((ROW, rr), (COL, cr)):
        for k in range(inst.n):
            if ranks[k] == 1:
                continue
            better = list(ranks)
            better[k] -= 1
            problem = _problem(inst, better, cr) if side == ROW else _problem(inst, rr, better)
            y = lp_feasible(problem)
            if y is not None:
                return Verdict(False, y)
    return Verdict(True)


def efficient_stable_steps(inst: TwoSidedInstance) -> list[MatchingLottery]:
    """Pareto-improvement path from the N-proposing stable matching.

    Each step replaces the lottery with a dominating one found by the
    efficiency check; the total representative rank drops every step.
    """
    x = matching_lottery(deferred_acceptance(inst, N_SIDE))
    steps = [x]
    limit = 2 * inst.n * (inst.n - 1) + 1
    while True:
        v = efficiency_check_two_sided(x, inst)
        if v:
            return steps
        x = v.detail
        steps.append(x)
        if len(steps) > limit:
            raise AssertionError("Pareto improvement loop exceeded its rank-sum bound")


def efficient_stable(inst: TwoSidedInstance) -> MatchingLottery:
    return efficient_stable_steps(inst)[-1]


def distinct_representatives(x: MatchingLottery, inst: TwoSidedInstance) -> bool:
    rows, cols = representatives(x, inst)
    return len(set(rows)) == inst.n and len(set(cols)) == inst.n


def _exact_rep_constraints(cells_of, pref: Preference, h: Fraction, target: int) -> list[MassConstraint]:
    """Constraints forcing the representative to be exactly ``target``."""
    k = pref.rank(target)
    above = cells_of(pref.prefix(k - 1))
    out = []
    if h == 1:
        out.append(MassConstraint(cells_of({target}), GT, ZERO))
        if k > 1:
            out.append(MassConstraint(above, LE, ZERO))
    else:
        out.append(MassConstraint(cells_of(pref.prefix(k)), GE, ONE - h))
        if k > 1:
            out.append(MassConstraint(above, LT, ONE - h))
    return out


def realize_representatives(
    inst: TwoSidedInstance, row_reps: Sequence[int], col_reps: Sequence[int]
) -> Optional[MatchingLottery]:
    """A lottery whose representatives are exactly the given partners, or None."""
    cons = []
    for i, g in enumerate(row_reps):
        cons += _exact_rep_constraints(
            lambda s, i=i: frozenset((i, t) for t in s), inst.n_prefs[i], inst.n_h[i], g
        )
    for j, i in enumerate(col_reps):
        cons += _exact_rep_constraints(
            lambda s, j=j: frozenset((t, j) for t in s), inst.m_prefs[j], inst.m_h[j], i
        )
    return solve_constraints(inst.n, cons)


def _weakly_better_perms(prefs: Sequence[Preference], ranks: Sequence[int]) -> list[tuple[int, ...]]:
    n = len(prefs)
    return [
        p for p in itertools.permutations(range(n)) if all(prefs[k].rank(p[k]) <= ranks[k] for k in range(n))
    ]


def dr_efficiency_check(x: MatchingLottery, inst: TwoSidedInstance) -> Verdict:
    """Efficiency within lotteries that have distinct representatives.

    Fails when ``x`` itself lacks distinct representatives (detail None) or
    when some distinct-representative lottery dominates it (detail is
    ``(row_reps, col_reps, lottery)``).  Exponential; limited to n <= 4.
    """
    n = inst.n
    if n > DR_MAX_N:
        raise ValueError(f"DR-efficiency search is limited to n <= {DR_MAX_N}")
    if not distinct_representatives(x, inst):
        return Verdict(False, None)
    rr, cr = representative_ranks(x, inst)
    row_opts = _weakly_better_perms(inst.n_prefs, rr)
    col_opts = _weakly_better_perms(inst.m_prefs, cr)
    for sigma in row_opts:
        s_gain = sum(inst.n_prefs[i].rank(sigma[i]) for i in range(n)) < sum(rr)
        for tau in col_opts:
            if not s_gain and sum(inst.m_prefs[j].rank(tau[j]) for j in range(n)) == sum(cr):
                continue
            y = realize_representatives(inst, sigma, tau)
            if y is not None:
                return Verdict(False, (sigma, tau, y))
    return Verdict(True)


TwoSidedMechanism = Callable[[TwoSidedInstance], MatchingLottery]


def two_sided_sp_audit(
    mechanism: TwoSidedMechanism,
    n_h: Sequence[Fraction],
    m_h: Sequence[Fraction],
    profiles: Optional[Iterable[Sequence[Preference]]] = None,
    max_domain: Optional[int] = None,
) -> AuditResult:
    """Search for a profitable unilateral misreport by any agent on either side.

    Profiles list the N preferences then the M preferences; agent ``k`` of
    the profile is N agent ``k`` for ``k < n`` and M agent ``k - n`` after.
    """
    n_h = tuple(Fraction(v) for v in n_h)
    m_h = tuple(Fraction(v) for v in m_h)
    n = len(n_h)
    if profiles is None:
        guard_domain(count_profiles([n] * (2 * n)), max_domain)
        profiles = all_profiles([n] * (2 * n))

    def outcome(profile):
        return mechanism(TwoSidedInstance(profile[:n], profile[n:], n_h, m_h))

    def rank_of(x, agent, pref):
        if agent < n:
            return rep_rank(x.row(agent), pref, n_h[agent])
        return rep_rank(x.col(agent - n), pref, m_h[agent - n])

    return deviation_search(profiles, outcome, rank_of)
