"""Core model: validation, utility, feasibility, effective bounds."""

import pytest
from hypothesis import given, settings, strategies as st

from pbtally import gen, model, oracle
from pbtally.errors import (
    BoundsInverted,
    BudgetExceeded,
    DuplicateId,
    DuplicateProject,
    EmptyGroup,
    Infeasible,
    NegativeAllocation,
    NonLaminarLabels,
    NonPositiveCost,
    NotATree,
    TooManyApprovalsInContradictoryGroup,
    UnknownId,
    ValidationError,
)

from conftest import make_instance, profile, reference_feasible, reference_utility


# ---------------------------------------------------------------------------
# validate_instance


def test_single_group_single_root_label_valid():
    inst = make_instance(3, {1: [1, 2]}, labels=(model.LabelNode(1, None, 0, 3),))
    assert inst.budget == 3
    assert inst.groups[0].project_ids == (1, 2)


def test_three_level_tree_valid():
    labels = (
        model.LabelNode(1, None, 0, None),
        model.LabelNode(2, 1, 0, 2),
        model.LabelNode(3, 1, 0, 2),
        model.LabelNode(4, 2, 0, 1),
    )
    inst = make_instance(4, {1: [1], 2: [2], 3: [3]}, labels=labels,
                         label_of={1: 4, 2: 2, 3: 3})
    assert len(inst.labels) == 4


def test_overlapping_label_sets_rejected():
    labels = (
        model.LabelNode(1, None, 1, 1, group_ids=(1, 3)),
        model.LabelNode(2, None, 1, 1, group_ids=(2, 3)),
    )
    with pytest.raises(NonLaminarLabels):
        make_instance(2, {1: [1], 2: [2], 3: [3]}, labels=labels)


def test_overlapping_label_sets_allowed_when_opted_in():
    labels = (
        model.LabelNode(1, None, 1, 1, group_ids=(1, 3)),
        model.LabelNode(2, None, 1, 1, group_ids=(2, 3)),
    )
    inst = make_instance(2, {1: [1], 2: [2], 3: [3]}, labels=labels,
                         allow_nonlaminar=True)
    assert not model.is_laminar(inst)


def test_duplicate_project_rejected():
    inst = model.Instance(
        budget=2,
        projects=(model.Project(1, "a", 1, 1), model.Project(1, "b", 1, 1)),
        groups=(model.Group(1),),
    )
    with pytest.raises(DuplicateProject):
        model.validate_instance(inst)


def test_empty_group_rejected():
    inst = model.Instance(
        budget=2,
        projects=(model.Project(1, "a", 1, 1),),
        groups=(model.Group(1), model.Group(2)),
    )
    with pytest.raises(EmptyGroup):
        model.validate_instance(inst)


def test_nonpositive_cost_rejected():
    inst = model.Instance(
        budget=2,
        projects=(model.Project(1, "a", 0, 1),),
        groups=(model.Group(1),),
    )
    with pytest.raises(NonPositiveCost):
        model.validate_instance(inst)


def test_inverted_bounds_rejected():
    with pytest.raises(BoundsInverted):
        make_instance(2, {1: [1]}, labels=(model.LabelNode(1, None, 2, 1),))


def test_label_cycle_rejected():
    labels = (model.LabelNode(1, 2, 0, None), model.LabelNode(2, 1, 0, None))
    with pytest.raises(NotATree):
        make_instance(2, {1: [1]}, labels=labels, label_of={1: 1})


def test_unknown_label_parent_rejected():
    with pytest.raises(UnknownId):
        make_instance(2, {1: [1]}, labels=(model.LabelNode(1, 99, 0, None),))


def test_unknown_group_reference_rejected():
    inst = model.Instance(
        budget=2,
        projects=(model.Project(1, "a", 1, 7),),
        groups=(model.Group(1),),
    )
    with pytest.raises(UnknownId):
        model.validate_instance(inst)


def test_bad_bundle_rule_rejected():
    with pytest.raises(ValidationError):
        make_instance(2, {1: [1]},
                      tiebreak=model.TieBreakPolicy(bundle_rule="coin-flip"))


def test_priority_must_cover_all_projects():
    with pytest.raises(ValidationError):
        make_instance(2, {1: [1, 2]},
                      tiebreak=model.TieBreakPolicy(project_priority=(1,)))


def test_laminar_verdict_is_declaration_order_invariant():
    labels = [
        model.LabelNode(1, None, 0, None),
        model.LabelNode(2, 1, 0, 2),
        model.LabelNode(3, 1, 0, 2),
    ]
    base = make_instance(4, {1: [1, 2], 2: [3, 4]}, labels=tuple(labels),
                         label_of={1: 2, 2: 3})
    flipped = make_instance(4, {1: [1, 2], 2: [3, 4]},
                            labels=(labels[2], labels[0], labels[1]),
                            label_of={1: 2, 2: 3})
    assert model.is_laminar(base) and model.is_laminar(flipped)
    assert model.label_memberships(base) == model.label_memberships(flipped)


# ---------------------------------------------------------------------------
# validate_vote / validate_profile


def _k1_instance():
    return make_instance(4, {1: [1, 2, 3], 2: [4, 5]},
                         kinds={2: model.CONTRADICTORY})


def test_vote_at_budget_boundary_accepted():
    inst = _k1_instance()
    vote = model.make_vote("v", {1: (3, {1, 2, 3}, 0), 2: (1, {4}, 0)})
    out, warnings = model.validate_vote(inst, vote)
    assert out.total_funds() == 4
    assert warnings == ()


def test_vote_over_budget_rejected():
    inst = _k1_instance()
    vote = model.make_vote("v", {1: (4, {1, 2, 3}, 0), 2: (1, {4}, 0)})
    with pytest.raises(BudgetExceeded):
        model.validate_vote(inst, vote)


def test_contradictory_cap_enforced():
    inst = _k1_instance()
    vote = model.make_vote("v", {2: (2, {4, 5}, 0)})
    with pytest.raises(TooManyApprovalsInContradictoryGroup):
        model.validate_vote(inst, vote)


def test_complement_bit_cleared_on_contradictory_group():
    inst = _k1_instance()
    vote = model.make_vote("v", {2: (1, {4}, 1)})
    out, warnings = model.validate_vote(inst, vote)
    assert out.entry(2).complement == 0
    assert any("all-or-nothing" in w for w in warnings)


def test_zero_fund_approvals_dropped_with_warning():
    inst = _k1_instance()
    vote = model.make_vote("v", {1: (0, {1}, 0), 2: (1, {4}, 0)})
    out, warnings = model.validate_vote(inst, vote)
    assert out.entry(1) == model.ZERO_ENTRY
    assert any("approvals cleared" in w for w in warnings)


def test_unknown_group_and_foreign_approval_rejected():
    inst = _k1_instance()
    with pytest.raises(UnknownId):
        model.validate_vote(inst, model.make_vote("v", {9: (1, {1}, 0)}))
    with pytest.raises(UnknownId):
        model.validate_vote(inst, model.make_vote("v", {1: (1, {4}, 0)}))


def test_negative_funds_rejected():
    inst = _k1_instance()
    with pytest.raises(NegativeAllocation):
        model.validate_vote(inst, model.make_vote("v", {1: (-1, {1}, 0)}))


def test_duplicate_voter_ids_rejected():
    inst = _k1_instance()
    votes = [model.make_vote("v", {1: (1, {1}, 0)}),
             model.make_vote("v", {1: (1, {2}, 0)})]
    with pytest.raises(DuplicateId):
        model.validate_profile(inst, votes)


# ---------------------------------------------------------------------------
# utility and social welfare, frozen examples


def test_empty_outcome_has_zero_utility(fixtures):
    fx = fixtures["complement-lockin"]
    for v in fx.votes:
        assert model.utility(fx.instance, v, model.Outcome.of(())) == 0


def test_lockin_fixture_utility(fixtures):
    fx = fixtures["complement-lockin"]
    got = model.utility(fx.instance, fx.votes[0], model.Outcome.of({1, 2, 4}))
    assert got == 3  # min(2, 2) on the pair group plus min(1, 1) elsewhere


def test_complement_gate_zeroes_partial_bundles():
    inst = make_instance(3, {1: [1, 2]})
    vote = model.make_vote("v", {1: (2, {1, 2}, 1)})
    assert model.utility(inst, vote, model.Outcome.of({1})) == 0
    assert model.utility(inst, vote, model.Outcome.of({1, 2})) == 2


def test_lockin_truthful_welfare(fixtures):
    fx = fixtures["complement-lockin"]
    assert model.social_welfare(fx.instance, fx.votes, model.Outcome.of({1, 2, 4})) == 6


def test_swap_truthful_welfare(fixtures):
    fx = fixtures["substitute-swap"]
    assert model.social_welfare(fx.instance, fx.votes, model.Outcome.of({1, 2})) == 6


def test_welfare_of_empty_profile_is_zero(fixtures):
    fx = fixtures["substitute-swap"]
    assert model.social_welfare(fx.instance, [], model.Outcome.of({1, 2})) == 0


# ---------------------------------------------------------------------------
# feasibility, frozen examples


def test_nonlaminar_fixture_feasibility(fixtures):
    inst = fixtures["overlapping-labels"].instance
    assert model.is_feasible_outcome(inst, {3})
    assert model.is_feasible_outcome(inst, {1, 2})
    assert not model.is_feasible_outcome(inst, {1, 3})  # one window overfull
    assert not model.is_feasible_outcome(inst, {1})  # the other window empty


def test_empty_outcome_feasible_without_minima():
    inst = make_instance(2, {1: [1, 2]})
    assert model.is_feasible_outcome(inst, ())


def test_feasibility_matches_reference_evaluator():
    for seed in range(30):
        params = gen.GenParams(seed=seed, projects=(2, 8), cost=(1, 3),
                               tree_depth=(1, 2), bound_tightness=0.7)
        inst = gen.gen_instance(params)
        pids = [p.id for p in inst.projects]
        import random as _random
        rng = _random.Random(seed)
        for _ in range(40):
            q = frozenset(p for p in pids if rng.random() < 0.5)
            assert model.is_feasible_outcome(inst, q) == reference_feasible(inst, q)


def test_check_feasibility_examples():
    # a label needing more unit projects than it has
    bad = make_instance(4, {1: [1, 2]},
                        labels=(model.LabelNode(1, None, 3, None),), label_of={1: 1})
    assert not model.check_feasibility(bad)
    ok = make_instance(4, {1: [1, 2]})
    assert model.check_feasibility(ok)


def test_check_feasibility_matches_oracle_existence():
    for seed in range(30):
        params = gen.GenParams(seed=seed + 100, projects=(2, 8), cost=(1, 3),
                               tree_depth=(0, 2), bound_tightness=0.8, attempts=1)
        import random as _random
        rng = _random.Random(f"{params.seed}:instance:0")
        raw = gen._draw_instance(rng, params)
        if raw is None:
            continue
        try:
            inst = model.validate_instance(raw)
        except Exception:
            continue
        try:
            any_feasible = next(iter(oracle.enumerate_feasible(inst)), None) is not None
        except Exception:
            continue
        assert model.check_feasibility(inst) == any_feasible


# ---------------------------------------------------------------------------
# effective bounds


def test_effective_bounds_root_only():
    inst = make_instance(5, {1: [1, 2]})
    eb = model.effective_bounds(inst)
    assert eb[model.ROOT_ID] == (0, 5)


def test_effective_bounds_two_children():
    labels = (
        model.LabelNode(1, None, 0, 10),
        model.LabelNode(2, 1, 2, 5),
        model.LabelNode(3, 1, 3, 4),
    )
    inst = make_instance(
        10, {1: [1, 2, 3, 4, 5], 2: [6, 7, 8, 9, 10]},
        labels=labels, label_of={1: 2, 2: 3},
    )
    eb = model.effective_bounds(inst)
    assert eb[2] == (2, 5)
    assert eb[3] == (3, 4)
    assert eb[1] == (5, 9)  # children sums tighten the declared (0, 10)
    assert eb[model.ROOT_ID] == (5, 9)


def test_effective_bounds_infeasible_on_contradiction():
    labels = (model.LabelNode(1, None, 0, 1), model.LabelNode(2, 1, 2, 3))
    inst = make_instance(5, {1: [1, 2, 3]}, labels=labels, label_of={1: 2})
    with pytest.raises(Infeasible):
        model.effective_bounds(inst)


def test_effective_bounds_infeasible_when_root_min_exceeds_budget():
    inst = make_instance(2, {1: [1, 2, 3, 4]},
                         labels=(model.LabelNode(1, None, 3, None),), label_of={1: 1})
    with pytest.raises(Infeasible):
        model.effective_bounds(inst)


def test_effective_bounds_sound_and_root_tight():
    """Oracle-enumerated feasible outcomes stay inside every window; on
    unit costs some outcome meets the root minimum exactly."""
    for seed in range(25):
        params = gen.GenParams(seed=seed + 300, projects=(2, 9),
                               tree_depth=(1, 2), bound_tightness=0.8)
        inst = gen.gen_instance(params)
        eb = model.effective_bounds(inst)
        members = model.label_memberships(inst)
        cost = {p.id: p.cost for p in inst.projects}
        outcomes = list(oracle.enumerate_feasible(inst))
        assert outcomes, "gen promised a feasible instance"
        for q in outcomes:
            for lab in inst.labels:
                lo, hi = eb[lab.id]
                spend = sum(cost[p] for p in q & members[lab.id])
                assert lo <= spend <= hi
        root_lo = eb[model.ROOT_ID][0]
        assert min(sum(cost[p] for p in q) for q in outcomes) == root_lo


# ---------------------------------------------------------------------------
# algebraic properties


entry_st = st.tuples(
    st.integers(min_value=0, max_value=4),
    st.sets(st.sampled_from([1, 2, 3]), max_size=3),
    st.integers(min_value=0, max_value=1),
)


@st.composite
def vote_and_outcome(draw):
    inst = make_instance(9, {1: [1, 2, 3], 2: [4, 5, 6]})
    e1 = draw(entry_st)
    f2 = draw(st.integers(min_value=0, max_value=4))
    s2 = draw(st.sets(st.sampled_from([4, 5, 6]), max_size=3))
    raw = model.make_vote("v", {1: e1, 2: (f2, s2, 0)})
    vote, _ = model.validate_vote(inst, raw)
    q = draw(st.sets(st.sampled_from([1, 2, 3, 4, 5, 6])))
    return inst, vote, frozenset(q)


@given(vote_and_outcome())
@settings(max_examples=120, deadline=None)
def test_utility_bounds_and_reference(case):
    inst, vote, q = case
    u = model.utility(inst, vote, q)
    assert 0 <= u <= vote.total_funds() <= inst.budget
    assert u == reference_utility(inst, vote, q)


@given(vote_and_outcome(), st.sets(st.sampled_from([1, 2, 3, 4, 5, 6])))
@settings(max_examples=120, deadline=None)
def test_gateless_monotonicity(case, extra):
    inst, vote, q = case
    if any(e.complement for _, e in vote.entries):
        return
    assert model.utility(inst, vote, q) <= model.utility(inst, vote, q | frozenset(extra))


@given(vote_and_outcome())
@settings(max_examples=80, deadline=None)
def test_group_saturation(case):
    inst, vote, q = case
    for gid, e in vote.entries:
        single = model.Vote("v", ((gid, e),), 1)
        assert model.utility(inst, single, q) <= min(e.funds, inst.cost_of(e.approvals))


@given(vote_and_outcome(), st.integers(min_value=2, max_value=5))
@settings(max_examples=60, deadline=None)
def test_welfare_linear_in_weights(case, factor):
    inst, vote, q = case
    base = model.social_welfare(inst, [vote], q)
    scaled = model.Vote(vote.voter_id, vote.entries, vote.weight * factor)
    assert model.social_welfare(inst, [scaled], q) == factor * base
