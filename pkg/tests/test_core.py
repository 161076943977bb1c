from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import rep_by_prefix
from quantile_choice.core import (
    Comparison,
    Dominance,
    Lottery,
    Preference,
    as_fraction,
    compare_lotteries,
    rep_breakpoints,
    rep_rank,
    representative,
    sd_compare,
    sd_equivalence_audit,
)

A, B, C = 0, 1, 2
ABC = Preference((A, B, C))
THIRDS = Lottery((F(1, 3), F(1, 3), F(1, 3)))


@st.composite
def lotteries(draw, m=None):
    m = m or draw(st.integers(1, 6))
    d = draw(st.integers(1, 12))
    cuts = sorted(draw(st.lists(st.integers(0, d), min_size=m - 1, max_size=m - 1)))
    parts = [b - a for a, b in zip([0] + cuts, cuts + [d])]
    return Lottery(tuple(F(p, d) for p in parts))


@st.composite
def triples(draw):
    m = draw(st.integers(1, 6))
    x = draw(lotteries(m))
    y = draw(lotteries(m))
    pref = Preference(tuple(draw(st.permutations(range(m)))))
    return x, y, pref


quantiles = st.fractions(min_value=0, max_value=1, max_denominator=24)


def test_preference_rejects_non_permutation():
    with pytest.raises(ValueError):
        Preference((0, 0, 1))
    with pytest.raises(ValueError):
        Preference((0, 2))


def test_preference_accessors():
    p = Preference((2, 0, 1))
    assert p.rank(2) == 1 and p.rank(1) == 3
    assert p.at_rank(2) == 0
    assert p.prefix(2) == {2, 0}
    assert p.prefers(0, 1) and not p.prefers(1, 2)
    assert p.top == 2


def test_lottery_must_sum_to_one_exactly():
    with pytest.raises(ValueError):
        Lottery((F(1, 3), F(1, 3), F(1, 4)))
    with pytest.raises(ValueError):
        Lottery((F(3, 2), F(-1, 2)))


def test_floats_are_refused():
    with pytest.raises(TypeError):
        as_fraction(0.5)
    with pytest.raises(TypeError):
        Lottery((0.5, 0.5))


@pytest.mark.parametrize("h, expected", [(0, C), (1, A), (F(1, 3), B)])
def test_representative_of_uniform(h, expected):
    assert representative(THIRDS, ABC, h) == expected


def test_representative_threshold_is_inclusive_below():
    # strictly-worse mass 1/3 equals h, so b still qualifies
    assert representative(THIRDS, ABC, F(1, 3)) == B
    assert representative(THIRDS, ABC, F(1, 3) - F(1, 1000)) == C
    assert representative(THIRDS, ABC, F(2, 3)) == A


def test_compare_examples():
    det_a, det_b = Lottery.deterministic(3, A), Lottery.deterministic(3, B)
    assert compare_lotteries(det_a, det_b, ABC, F(1, 2)) is Comparison.PREFER_X
    assert compare_lotteries(THIRDS, THIRDS, ABC, 0) is Comparison.INDIFFERENT
    assert compare_lotteries(THIRDS, det_b, ABC, 0) is Comparison.PREFER_Y


def test_sd_compare_examples():
    top = Lottery.deterministic(3, A)
    assert sd_compare(top, THIRDS, ABC) is Dominance.X_DOMINATES
    assert sd_compare(THIRDS, Lottery.deterministic(3, B), ABC) is Dominance.INCOMPARABLE
    assert sd_compare(THIRDS, THIRDS, ABC) is Dominance.EQUAL


def test_breakpoints():
    assert rep_breakpoints(THIRDS, ABC) == [F(1, 3), F(2, 3), 1]
    assert rep_breakpoints(Lottery.deterministic(3, B), ABC) == [0, 1]
    assert rep_breakpoints(Lottery((F(1, 2), F(1, 2), 0)), ABC) == [0, F(1, 2), 1]


def test_breakpoints_of_full_support_deterministic():
    assert rep_breakpoints(Lottery.deterministic(1, 0), Preference((0,))) == [1]


def test_sd_equivalence_examples():
    assert sd_equivalence_audit(THIRDS, Lottery.deterministic(3, B), ABC)
    assert sd_equivalence_audit(THIRDS, THIRDS, ABC)


@settings(max_examples=300, deadline=None)
@given(triples(), quantiles)
def test_representative_matches_prefix_oracle(t, h):
    x, _, pref = t
    assert representative(x, pref, h) == rep_by_prefix(x, pref, h)


@settings(max_examples=200, deadline=None)
@given(triples(), quantiles, quantiles)
def test_representative_improves_with_h(t, h1, h2):
    x, _, pref = t
    lo, hi = sorted((h1, h2))
    assert rep_rank(x, pref, hi) <= rep_rank(x, pref, lo)


@settings(max_examples=200, deadline=None)
@given(triples())
def test_extreme_quantiles_pick_support_ends(t):
    x, _, pref = t
    support = [o for o in pref.order if x[o] > 0]
    assert representative(x, pref, 0) == support[-1]
    assert representative(x, pref, 1) == support[0]


@settings(max_examples=500, deadline=None)
@given(triples())
def test_sd_equivalence_property(t):
    assert sd_equivalence_audit(*t)


@settings(max_examples=200, deadline=None)
@given(triples())
def test_sd_is_antisymmetric(t):
    x, y, pref = t
    fwd, back = sd_compare(x, y, pref), sd_compare(y, x, pref)
    swap = {Dominance.X_DOMINATES: Dominance.Y_DOMINATES, Dominance.Y_DOMINATES: Dominance.X_DOMINATES}
    assert back is swap.get(fwd, fwd)
    if fwd is Dominance.EQUAL:
        assert x == y


@settings(max_examples=200, deadline=None)
@given(st.data())
def test_sd_transitive(data):
    m = data.draw(st.integers(1, 5))
    x, y, z = (data.draw(lotteries(m)) for _ in range(3))
    pref = Preference(tuple(data.draw(st.permutations(range(m)))))
    weak = (Dominance.X_DOMINATES, Dominance.EQUAL)
    if sd_compare(x, y, pref) in weak and sd_compare(y, z, pref) in weak:
        assert sd_compare(x, z, pref) in weak
