"""Lotteries over perfect matchings under representative-rank requirements.

An agent with quantile ``h < 1`` has a representative of rank at most ``r``
exactly when her ``r`` most preferred options carry mass at least ``1 - h``.
For ``h == 1`` the same requirement reads "positive mass on the top-``r``
options", an open condition.  Open conditions are decided by maximising a
common slack ``t`` and testing ``t > 0``; the feasible set is convex, so
every open condition can hold at once iff each can hold separately.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from ..core import ONE, ZERO, Lottery, Preference, check_quantile
from .simplex import EQ, GE, LE, LinearProgram, solve

ROW, COL = "row", "col"
GT, LT = ">", "<"


class MatchingLottery:
    """An exactly doubly stochastic ``n x n`` matrix of Fractions.

    Rows are indexed by agents of side N, columns by items (or agents of
    side M).  Row ``i`` is agent ``i``'s lottery over columns; column ``j``
    is agent ``j``'s lottery over rows.
    """

    __slots__ = ("_rows",)

    def __init__(self, rows: Iterable[Iterable]):
        rows = tuple(tuple(Fraction(v) for v in row) for row in rows)
        n = len(rows)
        if n == 0 or any(len(r) != n for r in rows):
            raise ValueError("matching lottery must be a non-empty square matrix")
        for i, row in enumerate(rows):
            if any(v < 0 for v in row):
                raise ValueError(f"negative entry in row {i}")
            if sum(row) != 1:
                raise ValueError(f"row {i} sums to {sum(row)}")
        for j in range(n):
            s = sum(rows[i][j] for i in range(n))
            if s != 1:
                raise ValueError(f"column {j} sums to {s}")
        self._rows = rows

    @classmethod
    def uniform(cls, n: int) -> "MatchingLottery":
        return cls([[Fraction(1, n)] * n for _ in range(n)])

    @classmethod
    def from_permutation(cls, perm: Sequence[int]) -> "MatchingLottery":
        n = len(perm)
        return cls([[ONE if perm[i] == j else ZERO for j in range(n)] for i in range(n)])

    @property
    def n(self) -> int:
        return len(self._rows)

    def __getitem__(self, key):
        i, j = key
        return self._rows[i][j]

    def row(self, i: int) -> tuple[Fraction, ...]:
        return self._rows[i]

    def col(self, j: int) -> tuple[Fraction, ...]:
        return tuple(r[j] for r in self._rows)

    def rows(self) -> tuple[tuple[Fraction, ...], ...]:
        return self._rows

    def is_integral(self) -> bool:
        return all(v in (ZERO, ONE) for row in self._rows for v in row)

    def __eq__(self, other):
        return isinstance(other, MatchingLottery) and self._rows == other._rows

    def __hash__(self):
        return hash(self._rows)

    def __repr__(self):
        body = "; ".join(" ".join(str(v) for v in row) for row in self._rows)
        return f"MatchingLottery([{body}])"


@dataclass(frozen=True)
class PrefixBound:
    """Agent ``agent`` on ``side`` needs a representative of rank <= ``rank``."""

    side: str
    agent: int
    pref: Preference
    rank: int
    h: Fraction

    def __post_init__(self):
        if self.side not in (ROW, COL):
            raise ValueError(f"side must be {ROW!r} or {COL!r}")
        if not 1 <= self.rank <= len(self.pref):
            raise ValueError(f"rank {self.rank} outside 1..{len(self.pref)}")
        object.__setattr__(self, "h", check_quantile(self.h))

    @classmethod
    def from_set(cls, side: str, agent: int, pref: Preference, options: Iterable[int], h) -> "PrefixBound":
        """Build from an explicit option set, which must be a rank prefix of ``pref``."""
        options = frozenset(options)
        r = len(options)
        if r == 0 or pref.prefix(r) != options:
            raise ValueError(f"{sorted(options)} is not a prefix of preference {pref.order}")
        return cls(side, agent, pref, r, h)

    @property
    def options(self) -> frozenset[int]:
        return self.pref.prefix(self.rank)

    @property
    def strict(self) -> bool:
        return self.h == 1

    @property
    def bound(self) -> Fraction:
        return ONE - self.h

    def cells(self) -> frozenset[tuple[int, int]]:
        if self.side == ROW:
            return frozenset((self.agent, g) for g in self.options)
        return frozenset((i, self.agent) for i in self.options)

    def constraint(self) -> "MassConstraint":
        if self.strict:
            return MassConstraint(self.cells(), GT, ZERO)
        return MassConstraint(self.cells(), GE, self.bound)


@dataclass(frozen=True)
class MassConstraint:
    """``sum(x[c] for c in cells) <sense> bound`` with sense in >=, <=, >, <."""

    cells: frozenset[tuple[int, int]]
    sense: str
    bound: Fraction

    def holds(self, x: MatchingLottery) -> bool:
        s = sum((x[c] for c in self.cells), ZERO)
        return {GE: s >= self.bound, LE: s <= self.bound, GT: s > self.bound, LT: s < self.bound}[self.sense]

    def key(self):
        return (tuple(sorted(self.cells)), self.sense, self.bound)


@dataclass(frozen=True)
class FeasibilityProblem:
    """Doubly stochastic ``n x n`` matrices subject to prefix mass bounds.

    ``bounds`` carries at most one :class:`PrefixBound` per (side, agent);
    ``extra`` holds arbitrary cell-set constraints.
    """

    n: int
    bounds: tuple[PrefixBound, ...] = ()
    extra: tuple[MassConstraint, ...] = ()

    def __post_init__(self):
        seen = set()
        for b in self.bounds:
            if len(b.pref) != self.n:
                raise ValueError(f"preference of {b.side} agent {b.agent} has wrong length")
            if not 0 <= b.agent < self.n:
                raise ValueError(f"{b.side} agent {b.agent} out of range")
            if (b.side, b.agent) in seen:
                raise ValueError(f"duplicate bound for {b.side} agent {b.agent}")
            seen.add((b.side, b.agent))
        for c in self.extra:
            if any(not (0 <= i < self.n and 0 <= g < self.n) for i, g in c.cells):
                raise ValueError("constraint cell out of range")

    @classmethod
    def from_ranks(
        cls,
        row_prefs: Sequence[Preference],
        row_h: Sequence,
        row_r: Sequence[int],
        col_prefs: Optional[Sequence[Preference]] = None,
        col_h: Optional[Sequence] = None,
        col_r: Optional[Sequence[int]] = None,
    ) -> "FeasibilityProblem":
        n = len(row_prefs)
        bounds = [PrefixBound(ROW, i, row_prefs[i], row_r[i], row_h[i]) for i in range(n)]
        if col_prefs is not None:
            bounds += [PrefixBound(COL, j, col_prefs[j], col_r[j], col_h[j]) for j in range(n)]
        return cls(n, tuple(bounds))

    def bound_for(self, side: str, agent: int) -> Optional[PrefixBound]:
        for b in self.bounds:
            if b.side == side and b.agent == agent:
                return b
        return None

    def with_rank(self, side: str, agent: int, rank: int) -> "FeasibilityProblem":
        bounds = tuple(replace(b, rank=rank) if (b.side, b.agent) == (side, agent) else b for b in self.bounds)
        return replace(self, bounds=bounds)

    def constraints(self) -> list[MassConstraint]:
        return [b.constraint() for b in self.bounds] + list(self.extra)


def _verify(x: MatchingLottery, constraints: Iterable[MassConstraint]) -> None:
    for c in constraints:
        if not c.holds(x):
            raise AssertionError(f"solver witness violates {c}")


@functools.lru_cache(maxsize=200_000)
def _solve_matrix(n: int, key: tuple) -> Optional[MatchingLottery]:
    cons = [MassConstraint(frozenset(cells), sense, bound) for cells, sense, bound in key]
    strict = any(c.sense in (GT, LT) for c in cons)
    nv = n * n + (1 if strict else 0)
    t = n * n
    lp = LinearProgram(nv)
    for i in range(n):
        lp.add({i * n + g: ONE for g in range(n)}, EQ, ONE)
    for g in range(n):
        lp.add({i * n + g: ONE for i in range(n)}, EQ, ONE)
    for c in cons:
        coeffs = {i * n + g: ONE for i, g in c.cells}
        if c.sense == GT:
            coeffs[t] = -ONE
            lp.add(coeffs, GE, c.bound)
        elif c.sense == LT:
            coeffs[t] = ONE
            lp.add(coeffs, LE, c.bound)
        else:
            lp.add(coeffs, c.sense, c.bound)
    if strict:
        lp.add({t: ONE}, LE, ONE)
        lp.objective = {t: ONE}
    res = solve(lp)
    if res.status != "optimal" or (strict and res.value <= 0):
        return None
    x = MatchingLottery([res.x[i * n:(i + 1) * n] for i in range(n)])
    _verify(x, cons)
    return x


def solve_constraints(n: int, constraints: Iterable[MassConstraint]) -> Optional[MatchingLottery]:
    """Some doubly stochastic matrix meeting every constraint, or None."""
    key = tuple(sorted(c.key() for c in constraints))
    return _solve_matrix(n, key)


def lp_feasible(problem: FeasibilityProblem) -> Optional[MatchingLottery]:
    """A witness lottery for ``problem`` from the exact simplex engine, or None."""
    x = solve_constraints(problem.n, problem.constraints())
    if x is not None:
        _verify(x, problem.constraints())
    return x


def rank_bound(prefix: Iterable[int], h) -> tuple[frozenset[int], Fraction, bool]:
    """Voting prefix constraint for representative rank within ``prefix``."""
    h = check_quantile(h)
    return frozenset(prefix), ONE - h, h == 1


@functools.lru_cache(maxsize=200_000)
def _solve_simplex(m: int, key: tuple) -> Optional[tuple[Fraction, ...]]:
    strict = any(s for _, _, s in key)
    t = m
    lp = LinearProgram(m + (1 if strict else 0))
    lp.add({o: ONE for o in range(m)}, EQ, ONE)
    for opts, bound, s in key:
        coeffs = {o: ONE for o in opts}
        if s:
            coeffs[t] = -ONE
            lp.add(coeffs, GE, ZERO)
        else:
            lp.add(coeffs, GE, bound)
    if strict:
        lp.add({t: ONE}, LE, ONE)
        lp.objective = {t: ONE}
    res = solve(lp)
    if res.status != "optimal" or (strict and res.value <= 0):
        return None
    return res.x[:m]


def lp_feasible_voting(m: int, constraints: Iterable[tuple]) -> Optional[Lottery]:
    """A lottery over ``m`` alternatives meeting prefix lower bounds, or None.

    Each constraint is ``(options, bound)`` or ``(options, bound, strict)``;
    a strict constraint asks for positive mass on ``options`` and ignores
    ``bound``.
    """
    key = []
    for c in constraints:
        opts, bound = frozenset(c[0]), Fraction(c[1])
        strict = bool(c[2]) if len(c) > 2 else False
        if not opts or any(not 0 <= o < m for o in opts):
            raise ValueError(f"bad option set {sorted(opts)}")
        if not strict and not ZERO <= bound <= ONE:
            raise ValueError(f"bound {bound} outside [0, 1]")
        key.append((tuple(sorted(opts)), ZERO if strict else bound, strict))
    probs = _solve_simplex(m, tuple(sorted(key)))
    if probs is None:
        return None
    lot = Lottery(probs)
    for opts, bound, strict in key:
        s = sum(lot[o] for o in opts)
        if (strict and s <= 0) or (not strict and s < bound):
            raise AssertionError(f"solver witness violates {(opts, bound, strict)}")
    return lot


def min_rank_for_agent(problem: FeasibilityProblem, agent: int, side: str = ROW, search: str = "linear") -> int:
    """Smallest rank requirement for ``agent`` keeping ``problem`` feasible.

    The problem must already hold a bound for that agent and be feasible with
    it relaxed to ``n``.  ``search`` is ``"linear"`` (ascending scan) or
    ``"binary"``; feasibility is monotone in the requirement so both agree.
    """
    if problem.bound_for(side, agent) is None:
        raise KeyError(f"no bound for {side} agent {agent}")
    n = problem.n

    def ok(t):
        return lp_feasible(problem.with_rank(side, agent, t)) is not None

    if search == "linear":
        for t in range(1, n + 1):
            if ok(t):
                return t
        raise ValueError("problem infeasible even with the requirement relaxed to n")
    if search == "binary":
        if not ok(n):
            raise ValueError("problem infeasible even with the requirement relaxed to n")
        lo, hi = 1, n
        while lo < hi:
            mid = (lo + hi) // 2
            if ok(mid):
                hi = mid
            else:
                lo = mid + 1
        return lo
    raise ValueError(f"unknown search {search!r}")


def cross_check_feasibility(problem: FeasibilityProblem) -> bool:
    """Whether the simplex engine and the max-flow engine agree on ``problem``."""
    from .flow import flow_feasible

    return (lp_feasible(problem) is not None) == flow_feasible(problem)
