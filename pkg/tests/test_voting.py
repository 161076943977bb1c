import random
from fractions import Fraction as F

import pytest

from oracles import voting_efficient
from quantile_choice.audit import DomainTooLarge, all_profiles
from quantile_choice.core import Lottery, Preference
from quantile_choice.fixtures import anti_monotone_rule, two_voter_profiles
from quantile_choice.sampling import random_lottery, random_preference
from quantile_choice.voting import (
    VotingInstance,
    constant_rule,
    destabilising_quantile,
    dictatorship_rule,
    efficiency_audit,
    h_grid,
    is_efficient_lottery,
    is_monotone,
    r_plurality,
    r_plurality_literal,
    rep_ranks,
    strategyproofness_audit,
    top2_half_rule,
    uniform_rule,
    universally_efficient_lottery,
)

AB, BA = Preference((0, 1)), Preference((1, 0))
HALF = F(1, 2)


def test_common_top_lottery_is_efficient():
    prefs = (Preference((0, 1, 2)), Preference((0, 2, 1)))
    x = Lottery.deterministic(3, 0)
    for h in h_grid():
        assert is_efficient_lottery(x, VotingInstance(prefs, (h, h)))


def test_opposed_voters_half_half_is_dominated():
    inst = VotingInstance((AB, BA), (F(0), F(0)))
    v = is_efficient_lottery(Lottery((HALF, HALF)), inst)
    assert not v
    assert not voting_efficient(Lottery((HALF, HALF)), inst.prefs, inst.h)


def test_universally_efficient_lottery():
    assert universally_efficient_lottery((AB, AB)) == Lottery((1, 0))
    assert universally_efficient_lottery((AB, BA)) is None
    assert universally_efficient_lottery((Preference((2, 0, 1)),)) == Lottery((0, 0, 1))


def test_universal_lottery_fails_for_some_quantiles():
    # with distinct tops every deterministic lottery is beaten at some h vector
    prefs = (AB, BA)
    for x in (Lottery((1, 0)), Lottery((0, 1)), Lottery((HALF, HALF))):
        assert any(not is_efficient_lottery(x, VotingInstance(prefs, (h1, h2))) for h1 in h_grid() for h2 in h_grid())


def test_r_plurality_formula():
    prefs = (AB, AB, BA)
    assert r_plurality(prefs, (F(1, 4), HALF, F(0)))[0] == F(3, 4)
    assert r_plurality((AB, AB, AB), (0, 0, 0)) == Lottery((1, 0))


def test_r_plurality_ties_go_to_first_alternative():
    assert r_plurality((AB, BA), (F(1, 3), 0))[0] == F(2, 3)


def test_r_plurality_rejects_three_alternatives():
    with pytest.raises(ValueError):
        r_plurality((Preference((0, 1, 2)),), (0,))


def test_r_plurality_when_winner_fans_only_need_support():
    # every supporter of the winner has h = 1
    prefs, h = (AB, AB, BA), (F(1), F(1), F(1, 3))
    literal = r_plurality_literal(prefs, h)
    assert literal == Lottery((0, 1))
    assert not is_efficient_lottery(literal, VotingInstance(prefs, h))
    x = r_plurality(prefs, h)
    assert x == Lottery((F(1, 3), F(2, 3)))
    assert is_efficient_lottery(x, VotingInstance(prefs, h))


def test_top2_half_examples():
    abc, bac = Preference((0, 1, 2)), Preference((1, 0, 2))
    assert top2_half_rule((abc, abc, bac), (HALF,) * 3) == Lottery((HALF, HALF, 0))
    assert top2_half_rule((Preference((2, 0, 1)),) * 2, (HALF,) * 2) == Lottery((HALF, 0, HALF))


def test_uniform_rule_tops_at_high_quantile():
    x = uniform_rule((Preference((1, 2, 0)),), (F(2, 3),))
    assert x == Lottery.uniform(3)
    for p in all_profiles([3]):
        assert is_efficient_lottery(x, VotingInstance(p, (F(2, 3),)))


def test_dictatorship():
    rule = dictatorship_rule(1)
    assert rule((AB, BA), (0, 0)) == Lottery((0, 1))
    assert strategyproofness_audit(rule, 2, 3, (F(1, 4),) * 2).passed
    assert efficiency_audit(rule, 2, 3, (F(1, 4),) * 2).passed


def test_monotonicity():
    assert is_monotone(r_plurality, 3, (F(1, 4), HALF, 0)) is None
    assert is_monotone(constant_rule(Lottery((HALF, HALF))), 3, (0, 0, 0)) is None
    v = is_monotone(anti_monotone_rule, 2, (0, 0))
    assert v is not None and v.agent == 0 and v.after > v.before


def test_anti_monotone_rule_is_manipulable_at_constructed_quantile():
    v = is_monotone(anti_monotone_rule, 2, (0, 0))
    h = [F(0), F(0)]
    h[v.agent] = destabilising_quantile(v)
    res = strategyproofness_audit(anti_monotone_rule, 2, 2, h)
    assert not res.passed
    assert res.counterexample.agent == v.agent


def test_monotone_rules_pass_sp_over_grid():
    rng = random.Random(1)
    for _ in range(40):
        h = tuple(rng.choice(h_grid()) for _ in range(2))
        assert strategyproofness_audit(r_plurality, 2, 2, h).passed
        assert strategyproofness_audit(constant_rule(Lottery((F(1, 3), F(2, 3)))), 2, 2, h).passed


def test_efficiency_matches_rank_vector_oracle():
    rng = random.Random(9)
    for _ in range(150):
        n, m = rng.randint(1, 3), rng.randint(1, 3)
        prefs = tuple(random_preference(rng, m) for _ in range(n))
        h = tuple(rng.choice(h_grid()) for _ in range(n))
        x = random_lottery(rng, m, 6)
        assert bool(is_efficient_lottery(x, VotingInstance(prefs, h))) == voting_efficient(x, prefs, h)


def test_dominating_witness_really_dominates():
    rng = random.Random(4)
    for _ in range(100):
        prefs = tuple(random_preference(rng, 3) for _ in range(3))
        inst = VotingInstance(prefs, tuple(rng.choice(h_grid()) for _ in range(3)))
        x = random_lottery(rng, 3)
        v = is_efficient_lottery(x, inst)
        if not v:
            before, after = rep_ranks(x, inst), rep_ranks(v.detail, inst)
            assert all(a <= b for a, b in zip(after, before)) and after != before


def test_two_voter_profiles_fixture():
    profiles = two_voter_profiles()
    assert set(profiles) == {"11", "12", "21", "22"}
    h = (F(2, 5), F(2, 5))
    # in every profile but the first some alternative is dominated
    for key in ("12", "21", "22"):
        assert not is_efficient_lottery(Lottery.uniform(3), VotingInstance(profiles[key], h))
    assert is_efficient_lottery(Lottery.deterministic(3, 0), VotingInstance(profiles["22"], h))


def test_rules_return_valid_lotteries_everywhere():
    for p in all_profiles([3, 3]):
        for rule in (top2_half_rule, uniform_rule, dictatorship_rule(0)):
            x = rule(p, (HALF, HALF))
            assert sum(x) == 1 and min(x) >= 0


def test_top2_half_depends_on_scores_only():
    a = (Preference((0, 1, 2)), Preference((1, 2, 0)))
    b = (Preference((0, 2, 1)), Preference((1, 0, 2)))
    assert top2_half_rule(a, (HALF,) * 2) == top2_half_rule(b, (HALF,) * 2)


def test_domain_guard():
    with pytest.raises(DomainTooLarge):
        strategyproofness_audit(uniform_rule, 4, 3, (HALF,) * 4, max_domain=100)
