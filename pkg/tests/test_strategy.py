"""Deviation search: frozen counterexamples and space mechanics."""

import pytest

from pbtally import model, strategy
from pbtally.errors import SpaceTooLarge

from conftest import make_instance, profile


def _entries(*pairs):
    return tuple((gid, model.VoteEntry(f, frozenset(s), t)) for gid, (f, s, t) in pairs)


def test_lockin_deviation_frozen(fixtures):
    fx = fixtures["complement-lockin"]
    r = strategy.find_profitable_deviation(fx.instance, fx.votes, "3")
    assert r is not None
    assert r.deviated_vote.entries == _entries((1, (3, {1, 2, 3}, 1)))
    assert r.truthful_outcome == frozenset({1, 2, 4})
    assert r.deviated_outcome == frozenset({1, 2, 3})
    assert (r.truthful_utility, r.deviated_utility) == (0, 1)
    assert (r.welfare_truthful, r.welfare_deviated) == (6, 7)
    assert r.delta == 1
    assert r.exhaustive


def test_swap_deviation_frozen(fixtures):
    fx = fixtures["substitute-swap"]
    r = strategy.find_profitable_deviation(fx.instance, fx.votes, "7")
    assert r is not None
    assert r.deviated_vote.entries == _entries((1, (1, {3}, 0)), (2, (1, {4}, 0)))
    assert r.truthful_outcome == frozenset({1, 2})
    assert r.deviated_outcome == frozenset({3, 4})
    assert (r.truthful_utility, r.deviated_utility) == (0, 1)
    assert (r.welfare_truthful, r.welfare_deviated) == (6, 7)


def test_overlapping_labels_break_equilibrium(fixtures):
    fx = fixtures["overlapping-labels"]
    found = strategy.nash_check(fx.instance, fx.votes)
    assert [r.voter_id for r in found] == ["3"]
    r = found[0]
    assert r.deviated_vote.entries == _entries((1, (1, {1}, 0)), (2, (1, {2}, 0)))
    assert r.truthful_outcome == frozenset({3})
    assert r.deviated_outcome == frozenset({1, 2})
    assert r.delta == 1


def test_showcase_truthful_without_complement_bit(fixtures):
    fx = fixtures["showcase"]
    assert strategy.nash_check(fx.instance, fx.votes, include_complements=False) == []


def test_showcase_complement_bit_reopens_manipulation(fixtures):
    # the bit is the sole lever: with it, the same profile stops being stable
    fx = fixtures["showcase"]
    found = strategy.nash_check(fx.instance, fx.votes)
    assert found
    assert all(
        any(e.complement for _, e in r.deviated_vote.entries) for r in found
    )


def test_group_options_pinned_order():
    inst = make_instance(3, {1: [1, 2]})
    opts = strategy.group_options(inst, inst.groups[0])
    assert opts == (
        model.ZERO_ENTRY,
        model.VoteEntry(1, frozenset({1}), 0),
        model.VoteEntry(1, frozenset({2}), 0),
        model.VoteEntry(1, frozenset({1, 2}), 0),
        model.VoteEntry(1, frozenset({1, 2}), 1),
        model.VoteEntry(2, frozenset({1, 2}), 0),
        model.VoteEntry(2, frozenset({1, 2}), 1),
    )
    bare = strategy.group_options(inst, inst.groups[0], include_complements=False)
    assert bare == tuple(o for o in opts if not o.complement)


def test_group_options_contradictory_capped():
    inst = make_instance(3, {1: [1, 2, 3]}, kinds={1: model.CONTRADICTORY})
    opts = strategy.group_options(inst, inst.groups[0])
    assert all(len(o.approvals) <= 1 for o in opts)
    assert all(o.complement == 0 for o in opts)


def test_truthful_entry_always_in_space():
    inst = make_instance(3, {1: [1, 2]})
    vote = model.make_vote("1", {1: (2, {1, 2}, 1)})
    space = strategy.build_deviation_space(inst, vote, include_complements=False)
    gid, opts, ti = space.groups[0]
    assert opts[ti] == model.VoteEntry(2, frozenset({1, 2}), 1)
    assert ti == len(opts) - 1  # excluded form gets appended, not silently dropped


def test_canonical_entry_clamps():
    inst = make_instance(3, {1: [1, 2]})
    g = inst.groups[0]
    e = strategy.canonical_entry(inst, g, model.VoteEntry(9, frozenset({1}), 1))
    assert e == model.VoteEntry(1, frozenset({1}), 0)  # funds to cost, bit off singleton
    assert strategy.canonical_entry(inst, g, model.VoteEntry(0, frozenset({1}), 0)) == model.ZERO_ENTRY
    assert strategy.canonical_entry(inst, g, model.VoteEntry(2, frozenset(), 0)) == model.ZERO_ENTRY


def test_space_cap_enforced(fixtures):
    fx = fixtures["showcase"]
    with pytest.raises(SpaceTooLarge, match="over the cap 5"):
        strategy.build_deviation_space(fx.instance, fx.votes[0], cap=5)


def test_single_group_space(fixtures):
    fx = fixtures["substitute-swap"]
    vote = fx.votes[6]
    full = strategy.build_deviation_space(fx.instance, vote)
    single = strategy.build_deviation_space(fx.instance, vote, single_group=True)
    assert full.size == 2560
    assert single.size == 1 + sum(len(o) - 1 for _, o, _ in single.groups)
    truth = {gid: opts[ti] for gid, opts, ti in single.groups}
    for dev in strategy.enumerate_deviations(fx.instance, single):
        entries = dict(dev.entries)
        changed = [
            gid for gid in truth
            if entries.get(gid, model.ZERO_ENTRY) != truth[gid]
        ]
        assert len(changed) == 1


def test_enumerated_deviations_respect_budget(fixtures):
    fx = fixtures["complement-lockin"]
    space = strategy.build_deviation_space(fx.instance, fx.votes[2])
    seen = set()
    for dev in strategy.enumerate_deviations(fx.instance, space):
        assert sum(e.funds for _, e in dev.entries) <= fx.instance.budget
        model.validate_vote(fx.instance, dev)
        assert dev.entries not in seen
        seen.add(dev.entries)


def test_fast_and_slow_paths_agree(fixtures):
    cases = [
        ("complement-lockin", "3"),
        ("substitute-swap", "7"),
        ("overlapping-labels", "3"),
        ("showcase", "2"),
    ]
    for name, voter in cases:
        fx = fixtures[name]
        fast = strategy.find_profitable_deviation(fx.instance, fx.votes, voter)
        slow = strategy.find_profitable_deviation(fx.instance, fx.votes, voter, oracle_cap=0)
        assert fast == slow, name


def test_single_voter_is_truthful():
    inst = make_instance(4, {1: [1, 2, 3], 2: [4, 5]})
    votes = profile({1: (2, {1, 2}, 0), 2: (2, {4, 5}, 1)})
    assert strategy.nash_check(inst, votes) == []


def test_search_is_deterministic(fixtures):
    fx = fixtures["substitute-swap"]
    a = strategy.find_profitable_deviation(fx.instance, fx.votes, "7")
    b = strategy.find_profitable_deviation(fx.instance, fx.votes, "7")
    assert a == b
