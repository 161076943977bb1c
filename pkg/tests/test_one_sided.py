import random
from fractions import Fraction as F

import pytest

from oracles import lex_min_ranks, max_packing, max_top_agents_one_sided, one_sided_efficient
from quantile_choice.core import Preference, rep_rank
from quantile_choice.feasibility import MatchingLottery
from quantile_choice.fixtures import psd_counterexample, psd_misreport
from quantile_choice.one_sided import (
    OneSidedInstance,
    complete_lottery,
    efficiency_check_one_sided,
    envy_free_check,
    one_sided_sp_audit,
    proportionality_check,
    proportionality_floor,
    psd_mechanism,
    rep_ranks,
    sd_mechanism,
    serial_dictatorship,
    top_choice_welfare,
)
from quantile_choice.sampling import random_matching_lottery, random_one_sided

HALF = F(1, 2)


def same_prefs(n, h):
    return OneSidedInstance((Preference(tuple(range(n))),) * n, (h,) * n)


def test_complete_lottery_examples():
    assert complete_lottery([[0] * 3 for _ in range(3)]) == MatchingLottery.uniform(3)
    x = MatchingLottery([[F(1, 3), F(2, 3)], [F(2, 3), F(1, 3)]])
    assert complete_lottery(x.rows()) == x
    y = complete_lottery([[1, 0, 0], [0, 0, 0], [0, 0, 0]])
    assert y.row(0) == (1, 0, 0) and y.col(0) == (1, 0, 0)


def test_complete_lottery_rejects_overfull():
    with pytest.raises(ValueError):
        complete_lottery([[F(2, 3), F(1, 2)], [0, 0]])


def test_complete_lottery_dominates_partial():
    rng = random.Random(0)
    for _ in range(100):
        n = rng.randint(1, 4)
        x = random_matching_lottery(rng, n)
        partial = [[v * F(rng.randint(0, 2), 2) for v in row] for row in x.rows()]
        y = complete_lottery(partial)
        assert all(y[i, j] >= partial[i][j] for i in range(n) for j in range(n))


def test_top_choice_examples():
    distinct = OneSidedInstance((Preference((0, 1)), Preference((1, 0))), (F(1, 3), F(0)))
    assert top_choice_welfare(distinct)[1] == 2
    crowd = OneSidedInstance((Preference((0, 1, 2)),) * 3, (HALF, HALF, F(0)))
    outcome, count = top_choice_welfare(crowd)
    assert count == 2 and outcome.rep_ranks[:2] == (1, 1)
    assert top_choice_welfare(same_prefs(2, F(0)))[1] == 1


def test_top_choice_with_certainty_free_agents():
    # h = 1 agents only need some mass on their top item
    inst = OneSidedInstance((Preference((0, 1, 2)),) * 3, (F(1), F(1), F(1, 2)))
    outcome, count = top_choice_welfare(inst)
    assert count == 3 and outcome.rep_ranks == (1, 1, 1)


def test_top_choice_count_matches_oracles():
    rng = random.Random(1)
    grid = [F(k, 6) for k in range(7)]
    for _ in range(120):
        inst = random_one_sided(rng, rng.randint(1, 5), grid)
        outcome, count = top_choice_welfare(inst)
        fans = {g: [inst.h[i] for i in range(inst.n) if inst.prefs[i].top == g] for g in range(inst.n)}
        assert count == sum(max_packing(d) for d in fans.values())
        assert count == sum(r == 1 for r in outcome.rep_ranks)
        if inst.n <= 4:
            assert count == max_top_agents_one_sided(inst.prefs, inst.h)


def test_sd_first_agent_gets_top():
    rng = random.Random(2)
    for _ in range(30):
        inst = random_one_sided(rng, rng.randint(1, 4))
        assert sd_mechanism(inst).rep_ranks[0] == 1


def test_sd_identical_preferences():
    assert sd_mechanism(same_prefs(4, F(0))).rep_ranks == (1, 2, 3, 4)
    assert sd_mechanism(same_prefs(4, F(3, 4))).rep_ranks == (1, 1, 1, 1)


def test_sd_matches_lex_min_oracle():
    rng = random.Random(3)
    for _ in range(60):
        inst = random_one_sided(rng, rng.randint(1, 4))
        out = sd_mechanism(inst)
        assert out.rep_ranks == lex_min_ranks(inst.prefs, inst.h)
        assert out.rep_ranks == rep_ranks(out.lottery, inst)
        assert efficiency_check_one_sided(out.lottery, inst)


def test_sd_custom_order():
    inst = same_prefs(3, F(0))
    assert sd_mechanism(inst, order=[2, 0, 1]).rep_ranks == (2, 3, 1)
    with pytest.raises(ValueError):
        sd_mechanism(inst, order=[0, 0, 1])


def test_serial_dictatorship_rejects_infeasible_start():
    with pytest.raises(AssertionError):
        serial_dictatorship(same_prefs(2, F(0)), [1, 1])


def test_sd_is_strategyproof_on_small_domain():
    assert one_sided_sp_audit(sd_mechanism, (F(0), F(1, 3), HALF)).passed


def test_psd_counterexample():
    inst = psd_counterexample().instance
    out = psd_mechanism(inst)
    assert out.rep_ranks == (1, 1, 2)
    reps = [inst.prefs[i].at_rank(r) for i, r in enumerate(out.rep_ranks)]
    assert reps == [0, 1, 2]
    lied = inst.with_prefs(inst.prefs[:2] + (psd_misreport(),))
    x = psd_mechanism(lied).lottery
    truthful = inst.prefs[2]
    assert rep_rank(x.row(2), truthful, inst.h[2]) < out.rep_ranks[2]
    res = one_sided_sp_audit(psd_mechanism, inst.h, profiles=[inst.prefs])
    assert not res.passed and res.counterexample.agent == 2


def test_psd_outputs_proportional_and_efficient():
    rng = random.Random(4)
    for _ in range(60):
        inst = random_one_sided(rng, rng.randint(1, 4))
        out = psd_mechanism(inst)
        assert proportionality_check(out.lottery, inst)
        assert one_sided_efficient(out.lottery, inst.prefs, inst.h)
        floors = [proportionality_floor(inst.n, h) for h in inst.h]
        assert out.rep_ranks == lex_min_ranks(inst.prefs, inst.h, floors)


def test_psd_with_all_certain_agents():
    # positive-mass semantics keeps rank-1 floors feasible even with shared tops
    inst = OneSidedInstance((Preference((0, 1, 2)),) * 3, (F(1),) * 3)
    assert psd_mechanism(inst).rep_ranks == (1, 1, 1)


def test_proportionality_examples():
    inst = OneSidedInstance((Preference((0, 1, 2, 3)),) * 4, (HALF,) * 4)
    assert proportionality_check(MatchingLottery.uniform(4), inst)
    worst = MatchingLottery.from_permutation((3, 0, 1, 2))
    v = proportionality_check(worst, inst)
    assert not v and v.detail == [0, 3]
    assert proportionality_floor(4, HALF) == 2 and proportionality_floor(4, F(1)) == 1
    assert proportionality_floor(3, F(0)) == 3


def test_envy_examples():
    inst = same_prefs(2, F(0))
    assert envy_free_check(MatchingLottery.uniform(2), inst)
    v = envy_free_check(MatchingLottery.from_permutation((0, 1)), inst)
    assert not v and v.detail == (1, 0)


def test_efficiency_examples():
    opposed = OneSidedInstance((Preference((0, 1)), Preference((1, 0))), (F(0), F(0)))
    v = efficiency_check_one_sided(MatchingLottery.uniform(2), opposed)
    assert not v and v.detail == MatchingLottery.from_permutation((0, 1))
    assert efficiency_check_one_sided(MatchingLottery.uniform(1), OneSidedInstance((Preference((0,)),), (F(0),)))


def test_efficiency_matches_oracle():
    rng = random.Random(5)
    for _ in range(80):
        inst = random_one_sided(rng, rng.randint(1, 4))
        x = random_matching_lottery(rng, inst.n)
        assert bool(efficiency_check_one_sided(x, inst)) == one_sided_efficient(x, inst.prefs, inst.h)


@pytest.mark.parametrize("h", [F(0), F(1, 4), F(2, 5)])
def test_envy_freeness_and_efficiency_clash(h):
    # two agents with the same preferences and h < 1/2
    inst = same_prefs(2, h)
    rng = random.Random(7)
    candidates = [sd_mechanism(inst).lottery, sd_mechanism(inst, order=[1, 0]).lottery]
    candidates += [random_matching_lottery(rng, 2) for _ in range(300)]
    efficient = [x for x in candidates if efficiency_check_one_sided(x, inst)]
    assert len(efficient) >= 2
    assert not any(envy_free_check(x, inst) for x in efficient)


def test_envy_free_implies_proportional_sampled():
    rng = random.Random(6)
    for _ in range(20):
        inst = random_one_sided(rng, rng.randint(1, 4))
        for _ in range(100):
            x = random_matching_lottery(rng, inst.n)
            if envy_free_check(x, inst):
                assert proportionality_check(x, inst)
