"""Preferences, lotteries and the quantile representative.

Options are dense integers ``0..m-1``.  Every probability and quantile is a
:class:`fractions.Fraction`; floats are rejected at construction time because
the representative is defined by a mix of ``<=`` and ``<`` on cumulative sums.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, Union

Rational = Fraction
ZERO = Fraction(0)
ONE = Fraction(1)


def as_fraction(value: Union[int, str, Fraction]) -> Fraction:
    """Coerce ``value`` to an exact Fraction, refusing floats."""
    if isinstance(value, bool):
        raise TypeError("booleans are not probabilities")
    if isinstance(value, float):
        raise TypeError(f"float {value!r} is not exact; pass a Fraction or a string")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot interpret {value!r} as a rational")


def check_quantile(h) -> Fraction:
    h = as_fraction(h)
    if not ZERO <= h <= ONE:
        raise ValueError(f"quantile parameter {h} outside [0, 1]")
    return h


@dataclass(frozen=True)
class Preference:
    """A strict order over options ``0..m-1``, most preferred first."""

    order: tuple[int, ...]
    _rank: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        order = tuple(int(o) for o in self.order)
        m = len(order)
        if m == 0:
            raise ValueError("preference over an empty option set")
        if sorted(order) != list(range(m)):
            raise ValueError(f"{order} is not a permutation of 0..{m - 1}")
        rank = [0] * m
        for pos, o in enumerate(order):
            rank[o] = pos + 1
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "_rank", tuple(rank))

    def __len__(self) -> int:
        return len(self.order)

    def rank(self, option: int) -> int:
        """1-based position of ``option``; the top option has rank 1."""
        return self._rank[option]

    def at_rank(self, r: int) -> int:
        return self.order[r - 1]

    def prefix(self, r: int) -> frozenset[int]:
        """The ``r`` most preferred options."""
        return frozenset(self.order[:r])

    def prefers(self, a: int, b: int) -> bool:
        return self._rank[a] < self._rank[b]

    @property
    def top(self) -> int:
        return self.order[0]


@dataclass(frozen=True)
class Lottery:
    """A probability vector indexed by option id."""

    probs: tuple[Fraction, ...]

    def __post_init__(self):
        probs = tuple(as_fraction(p) for p in self.probs)
        if not probs:
            raise ValueError("empty lottery")
        if any(p < 0 for p in probs):
            raise ValueError(f"negative probability in {probs}")
        if sum(probs) != 1:
            raise ValueError(f"probabilities sum to {sum(probs)}, not 1")
        object.__setattr__(self, "probs", probs)

    @classmethod
    def deterministic(cls, m: int, option: int) -> "Lottery":
        return cls(tuple(ONE if o == option else ZERO for o in range(m)))

    @classmethod
    def uniform(cls, m: int) -> "Lottery":
        return cls((Fraction(1, m),) * m)

    def __len__(self) -> int:
        return len(self.probs)

    def __getitem__(self, option: int) -> Fraction:
        return self.probs[option]

    def __iter__(self):
        return iter(self.probs)

    def support(self) -> list[int]:
        return [o for o, p in enumerate(self.probs) if p > 0]


LotteryLike = Union[Lottery, Sequence[Fraction]]


def _check_compatible(x: LotteryLike, pref: Preference) -> None:
    if len(x) != len(pref):
        raise ValueError(f"lottery over {len(x)} options, preference over {len(pref)}")


def representative(x: LotteryLike, pref: Preference, h) -> int:
    """The ``h``-quantile representative of lottery ``x`` under ``pref``.

    For ``h == 1`` this is the best option with positive probability.
    Otherwise it is the unique option ``o`` with
    ``P(strictly worse than o) <= h < P(weakly worse than o)``.
    ``x`` may be a :class:`Lottery` or any probability row (e.g. a row of a
    matching lottery).
    """
    _check_compatible(x, pref)
    if h == 1:
        for o in pref.order:
            if x[o] > 0:
                return o
        raise AssertionError("lottery has empty support")
    below = ZERO
    for o in reversed(pref.order):
        weakly_below = below + x[o]
        if below <= h < weakly_below:
            return o
        below = weakly_below
    raise AssertionError(f"no representative for h={h}; probabilities sum to {below}")


def rep_rank(x: LotteryLike, pref: Preference, h) -> int:
    return pref.rank(representative(x, pref, h))


class Comparison(enum.Enum):
    PREFER_X = "prefer_x"
    PREFER_Y = "prefer_y"
    INDIFFERENT = "indifferent"


def compare_lotteries(x: LotteryLike, y: LotteryLike, pref: Preference, h) -> Comparison:
    rx, ry = rep_rank(x, pref, h), rep_rank(y, pref, h)
    if rx < ry:
        return Comparison.PREFER_X
    if ry < rx:
        return Comparison.PREFER_Y
    return Comparison.INDIFFERENT


class Dominance(enum.Enum):
    X_DOMINATES = "x_dominates"
    Y_DOMINATES = "y_dominates"
    EQUAL = "equal"
    INCOMPARABLE = "incomparable"


def lower_cumulative(x: LotteryLike, pref: Preference) -> list[Fraction]:
    """``P(weakly worse than o)`` for each ``o`` in preference order (best first)."""
    _check_compatible(x, pref)
    out = []
    acc = ZERO
    for o in reversed(pref.order):
        acc += x[o]
        out.append(acc)
    out.reverse()
    return out


def sd_compare(x: LotteryLike, y: LotteryLike, pref: Preference) -> Dominance:
    """Stochastic-dominance comparison: less mass in every lower set is better."""
    cx, cy = lower_cumulative(x, pref), lower_cumulative(y, pref)
    x_weak = all(a <= b for a, b in zip(cx, cy))
    y_weak = all(b <= a for a, b in zip(cx, cy))
    if x_weak and y_weak:
        return Dominance.EQUAL
    if x_weak:
        return Dominance.X_DOMINATES
    if y_weak:
        return Dominance.Y_DOMINATES
    return Dominance.INCOMPARABLE


def rep_breakpoints(x: LotteryLike, pref: Preference) -> list[Fraction]:
    """Sorted distinct lower cumulative sums of ``x``.

    The representative only changes when ``h`` crosses one of these values.
    """
    return sorted(set(lower_cumulative(x, pref)))


def quantile_test_points(breakpoints: Iterable[Fraction]) -> list[Fraction]:
    """A finite set of quantiles hitting every piece of a piecewise-constant rep.

    Includes 0, 1, every breakpoint, and the midpoint of every gap between
    consecutive points.
    """
    pts = sorted(set(breakpoints) | {ZERO, ONE})
    mids = [(a + b) / 2 for a, b in zip(pts, pts[1:])]
    return sorted(set(pts) | set(mids))


def weakly_dominates_for_all_quantiles(x: LotteryLike, y: LotteryLike, pref: Preference) -> bool:
    """Whether ``rep(x) >= rep(y)`` for every ``h`` in ``[0, 1]``."""
    hs = quantile_test_points(rep_breakpoints(x, pref) + rep_breakpoints(y, pref))
    return all(rep_rank(x, pref, h) <= rep_rank(y, pref, h) for h in hs)


def sd_equivalence_audit(x: LotteryLike, y: LotteryLike, pref: Preference) -> bool:
    """True iff SD-weak-dominance agrees with weak preference at every quantile."""
    sd = sd_compare(x, y, pref) in (Dominance.X_DOMINATES, Dominance.EQUAL)
    return sd == weakly_dominates_for_all_quantiles(x, y, pref)
