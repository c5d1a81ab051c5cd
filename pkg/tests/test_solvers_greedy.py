"""Two-pass greedy solver."""

import pytest

from pbtally import gen, model, oracle, profiles, solvers
from pbtally.errors import Infeasible, NotUnitCost

from conftest import make_instance, profile


def test_no_votes_pads_to_budget(fixtures):
    inst = fixtures["complement-lockin"].instance
    r = solvers.solve_greedy(inst, [])
    assert sorted(r.outcome) == [1, 2, 3]  # priority order fills the budget
    assert r.social_welfare == 0
    assert r.solver == "Greedy"


def test_no_pad_stops_at_zero_marginal(fixtures):
    inst = fixtures["complement-lockin"].instance
    r = solvers.solve_greedy(inst, [], pad=False)
    assert sorted(r.outcome) == []


def test_no_pad_still_meets_minima():
    labels = (model.LabelNode(1, None, 2, None),)
    inst = make_instance(3, {1: [1, 2, 3]}, labels=labels, label_of={1: 1})
    r = solvers.solve_greedy(inst, [], pad=False)
    assert len(r.outcome) == 2  # pass 1 is constraint satisfaction, not welfare


def test_swap_fixture_greedy_welfare(fixtures):
    fx = fixtures["substitute-swap"]
    r = solvers.solve_greedy(fx.instance, fx.votes)
    assert r.social_welfare == 6
    assert model.is_feasible_outcome(fx.instance, r.outcome)
    assert any("not guaranteed optimal" in w for w in r.warnings)


def test_showcase_greedy_matches_exact(fixtures):
    fx = fixtures["showcase"]
    r = solvers.solve_greedy(fx.instance, fx.votes)
    assert sorted(r.outcome) == [2, 3, 4, 8]
    assert r.social_welfare == 9
    assert r.warnings == ()


def test_lockin_truthful_greedy(fixtures):
    fx = fixtures["complement-lockin"]
    r = solvers.solve_greedy(fx.instance, fx.votes)
    assert sorted(r.outcome) == [1, 2, 4]
    assert r.social_welfare == 6


def test_rejects_general_costs():
    inst = make_instance(3, {1: [1, 2]}, costs={1: 2})
    with pytest.raises(NotUnitCost):
        solvers.solve_greedy(inst, [])


def test_unreachable_minimum_raises():
    # the label needs 2 from a contradictory group capped at 1
    labels = (model.LabelNode(1, None, 2, None),)
    inst = make_instance(3, {1: [1, 2]}, kinds={1: model.CONTRADICTORY},
                         labels=labels, label_of={1: 1})
    with pytest.raises(Infeasible):
        solvers.solve_greedy(inst, [])


def test_contradictory_cap_respected():
    inst = make_instance(3, {1: [1, 2, 3]}, kinds={1: model.CONTRADICTORY})
    votes = profile({1: (1, {1}, 0)}, {1: (1, {2}, 0)})
    r = solvers.solve_greedy(inst, votes, pad=True)
    assert len(set(r.outcome) & {1, 2, 3}) <= 1


def test_minima_met_on_generated_trees():
    for seed in range(20):
        params = gen.GenParams(seed=seed + 900, projects=(3, 8),
                               tree_depth=(1, 2), bound_tightness=0.8,
                               kind=gen.KIND_STRUCTURED)
        inst = gen.gen_instance(params)
        votes = gen.gen_profile(inst, params)
        r = solvers.solve_greedy(inst, votes)
        assert model.is_feasible_outcome(inst, r.outcome)
        assert model.respects_group_caps(inst, r.outcome)


def test_greedy_equals_oracle_on_compliant_profiles():
    checked = 0
    for seed in range(30):
        params = gen.GenParams(seed=seed + 1200, projects=(2, 7),
                               kind=gen.KIND_STRUCTURED)
        inst = gen.gen_instance(params)
        votes = gen.gen_profile(inst, params)
        if not profiles.classify(inst, votes).compliant:
            continue
        checked += 1
        assert (solvers.solve_greedy(inst, votes).social_welfare
                == oracle.solve_oracle(inst, votes).social_welfare)
    assert checked >= 20


def test_exact_never_below_greedy():
    for seed in range(20):
        params = gen.GenParams(seed=seed + 1500, projects=(2, 7), kind=gen.KIND_GENERAL)
        inst = gen.gen_instance(params)
        votes = gen.gen_profile(inst, params)
        greedy = solvers.solve_greedy(inst, votes)
        exact = solvers.solve_exact(inst, votes)
        assert exact.social_welfare >= greedy.social_welfare
