"""Manipulation search: exhaustive unilateral-deviation analysis.

A voter's deviation space is the cross product of per-group vote options
(approval subset, integer fund level, all-or-nothing bit), filtered by
the ballot budget.  Options that cannot change the outcome are deduped:
funds above the approval set's cost behave identically to funds equal to
it, an empty approval set behaves like an empty entry, and the bit is
meaningless on singleton approvals.

Deviations are tried in a deterministic order: per group, options sort
by approval popcount, then lexicographic approvals, then funds, then
bit; jointly, candidates sort by total displacement from the truthful
vote (sum of per-group option positions with truth at position 0), then
by the tuple of changed group ids, then by the position tuple.  Small
displacements first keeps reports close to the truthful vote, and the
order is total, so "first profitable" is well defined.

Profitability is judged in TRUE utility: the truthful vote evaluated
against both outcomes.  Re-tally semantics match the exact solver
(welfare argmax with the instance's bundle tie-break); small instances
use a cached evaluation over the enumerated feasible set instead of one
solver call per deviation.
"""

from dataclasses import dataclass
from itertools import combinations, product

from . import model
from .errors import SpaceTooLarge

DEFAULT_SPACE_CAP = 200_000


@dataclass(frozen=True)
class DeviationSpace:
    voter_id: str
    groups: tuple  # ((group_id, options tuple, truthful index), ...) by group id
    exhaustive: bool
    single_group: bool = False

    @property
    def size(self):
        """Joint candidates before budget filtering (truthful combo included)."""
        if self.single_group:
            return 1 + sum(len(o) - 1 for _, o, _ in self.groups)
        n = 1
        for _, opts, _ in self.groups:
            n *= len(opts)
        return n


@dataclass(frozen=True)
class DeviationResult:
    voter_id: str
    truthful_vote: model.Vote
    deviated_vote: model.Vote
    truthful_outcome: frozenset
    deviated_outcome: frozenset
    truthful_utility: int
    deviated_utility: int
    welfare_truthful: int
    welfare_deviated: int
    exhaustive: bool

    @property
    def delta(self):
        return self.deviated_utility - self.truthful_utility


def group_options(instance, group, include_complements=True):
    """All deduped vote options for one group, in the pinned order."""
    pm = instance.project_map()
    ids = sorted(group.project_ids)
    opts = [model.ZERO_ENTRY]
    for r in range(1, min(group.cap, len(ids)) + 1):
        for combo in combinations(ids, r):
            cost = sum(pm[p].cost for p in combo)
            for f in range(1, min(instance.budget, cost) + 1):
                opts.append(model.VoteEntry(f, frozenset(combo), 0))
                if include_complements and not group.contradictory and r >= 2:
                    opts.append(model.VoteEntry(f, frozenset(combo), 1))
    return tuple(opts)


def canonical_entry(instance, group, entry):
    """Map a vote entry to its utility-equivalent representative in the space."""
    if entry.funds <= 0 or not entry.approvals:
        return model.ZERO_ENTRY
    funds = min(entry.funds, instance.cost_of(entry.approvals), instance.budget)
    bit = entry.complement
    if group.contradictory or len(entry.approvals) < 2:
        bit = 0
    return model.VoteEntry(funds, entry.approvals, bit)


def build_deviation_space(
    instance, vote, include_complements=True, single_group=False, cap=DEFAULT_SPACE_CAP
):
    """Per-group options with the truthful entry located in each list."""
    groups = []
    for g in instance.groups:
        opts = list(group_options(instance, g, include_complements))
        truth = canonical_entry(instance, g, vote.entry(g.id))
        try:
            ti = opts.index(truth)
        except ValueError:
            # keeps truth inside the space even when its form is excluded
            opts.append(truth)
            ti = len(opts) - 1
        groups.append((g.id, tuple(opts), ti))
    space = DeviationSpace(vote.voter_id, tuple(groups), True, single_group)
    if space.size > cap:
        raise SpaceTooLarge(
            f"deviation space for voter {vote.voter_id} has {space.size} "
            f"candidates, over the cap {cap}; use the single-group mode or raise the cap"
        )
    return space


def _ordered_positions(space):
    """Position tuples sorted by (displacement, changed ids, positions)."""
    lengths = [len(opts) for _, opts, _ in space.groups]
    gids = [gid for gid, _, _ in space.groups]
    keyed = []
    if space.single_group:
        combos = []
        for gi in range(len(gids)):
            for p in range(1, lengths[gi]):
                combos.append(tuple(p if i == gi else 0 for i in range(len(gids))))
    else:
        combos = (pos for pos in product(*(range(n) for n in lengths)) if any(pos))
    for pos in combos:
        changed = tuple(g for g, p in zip(gids, pos) if p)
        keyed.append((sum(pos), changed, pos))
    keyed.sort()
    return [pos for _, _, pos in keyed]


def enumerate_deviations(instance, space):
    """Deviated votes in the deterministic order, budget-filtered."""
    ordered = []
    for gid, opts, ti in space.groups:
        ordered.append((gid, [opts[ti]] + [o for i, o in enumerate(opts) if i != ti]))
    for pos in _ordered_positions(space):
        entries = {}
        total = 0
        for (gid, opts), p in zip(ordered, pos):
            e = opts[p]
            if e.funds > 0:
                entries[gid] = e
                total += e.funds
        if total > instance.budget:
            continue
        yield model.Vote(space.voter_id, tuple(sorted(entries.items())), weight=1)


def _argmax_outcome(instance, feasible, keys, scores):
    best = None
    for qi in range(len(feasible)):
        k = (-scores[qi], keys[qi])
        if best is None or k < best[0]:
            best = (k, qi)
    return best[1]


def find_profitable_deviation(
    instance,
    votes,
    voter_id,
    solver_mode="exact",
    space=None,
    include_complements=True,
    single_group=False,
    space_cap=DEFAULT_SPACE_CAP,
    oracle_cap=20,
):
    """First strictly profitable deviation for one voter, else None.

    Profit means the voter's TRUE utility (their truthful vote scored
    against the outcome) strictly rises.  The deviated vote keeps the
    voter's weight out of the comparison by construction: re-tallies use
    the original weight.
    """
    votes = list(votes)
    idx = next(i for i, v in enumerate(votes) if v.voter_id == voter_id)
    me = votes[idx]
    if space is None:
        space = build_deviation_space(
            instance, me, include_complements=include_complements,
            single_group=single_group, cap=space_cap,
        )

    if solver_mode in ("exact", "auto", "oracle") and len(instance.projects) <= oracle_cap:
        return _find_fast(instance, votes, idx, space, oracle_cap)
    return _find_slow(instance, votes, idx, space, solver_mode)


def _find_fast(instance, votes, idx, space, oracle_cap):
    from . import oracle as oracle_mod

    me = votes[idx]
    feasible = list(oracle_mod.enumerate_feasible(instance, cap=oracle_cap))
    keys = [model.bundle_key(instance.tiebreak, q) for q in feasible]
    others = [0] * len(feasible)
    for j, v in enumerate(votes):
        if j == idx:
            continue
        for qi, q in enumerate(feasible):
            others[qi] += v.weight * model.utility(instance, v, q)

    def entry_vec(gid, entry):
        if entry.funds <= 0:
            return [0] * len(feasible)
        single = model.Vote(me.voter_id, ((gid, entry),), 1)
        return [model.utility(instance, single, q) for q in feasible]

    vecs = {}
    truthful_vec = [0] * len(feasible)
    for gid, opts, ti in space.groups:
        vecs[gid] = {e: entry_vec(gid, e) for e in set(opts)}
        tv = vecs[gid][opts[ti]]
        truthful_vec = [a + b for a, b in zip(truthful_vec, tv)]

    def tally(my_vec):
        scores = [o + me.weight * u for o, u in zip(others, my_vec)]
        qi = _argmax_outcome(instance, feasible, keys, scores)
        return qi, scores[qi]

    q0, w0 = tally(truthful_vec)
    base_true = model.utility(instance, me, feasible[q0])

    truth_entries = {gid: opts[ti] for gid, opts, ti in space.groups}
    for dev in enumerate_deviations(instance, space):
        my_vec = list(truthful_vec)
        dev_map = dict(dev.entries)
        for gid in vecs:
            old = truth_entries[gid]
            new = dev_map.get(gid, model.ZERO_ENTRY)
            if new == old:
                continue
            oldv = vecs[gid][old]
            newv = vecs[gid].get(new) or entry_vec(gid, new)
            for qi in range(len(my_vec)):
                my_vec[qi] += newv[qi] - oldv[qi]
        qd, wd = tally(my_vec)
        if qd == q0:
            continue
        true_after = model.utility(instance, me, feasible[qd])
        if true_after > base_true:
            deviated = model.Vote(me.voter_id, dev.entries, me.weight)
            return DeviationResult(
                me.voter_id, me, deviated, feasible[q0], feasible[qd],
                base_true, true_after, w0, wd, space.exhaustive,
            )
    return None


def _find_slow(instance, votes, idx, space, solver_mode):
    from . import solvers

    me = votes[idx]
    mode = solver_mode if solver_mode in solvers.MODES else "exact"
    base = solvers.solve(instance, votes, mode=mode)
    base_true = model.utility(instance, me, base.outcome)
    for dev in enumerate_deviations(instance, space):
        trial = list(votes)
        trial[idx] = model.Vote(me.voter_id, dev.entries, me.weight)
        res = solvers.solve(instance, trial, mode=mode)
        if res.outcome == base.outcome:
            continue
        true_after = model.utility(instance, me, res.outcome)
        if true_after > base_true:
            return DeviationResult(
                me.voter_id, me, trial[idx],
                base.outcome.selected, res.outcome.selected,
                base_true, true_after, base.social_welfare, res.social_welfare,
                space.exhaustive,
            )
    return None


def nash_check(
    instance,
    votes,
    solver_mode="exact",
    include_complements=True,
    single_group=False,
    space_cap=DEFAULT_SPACE_CAP,
    oracle_cap=20,
):
    """One profitable deviation per voter who has one; empty list means
    no voter gains by a unilateral lie at this tie-break policy."""
    found = []
    for v in votes:
        r = find_profitable_deviation(
            instance, votes, v.voter_id, solver_mode=solver_mode,
            include_complements=include_complements, single_group=single_group,
            space_cap=space_cap, oracle_cap=oracle_cap,
        )
        if r is not None:
            found.append(r)
    return found


@dataclass(frozen=True)
class Fixture:
    name: str
    instance: model.Instance
    votes: tuple
    note: str


def _fixture(name, note, budget, n_projects, group_projects, votes, tiebreak,
             labels=(), allow_nonlaminar=False):
    projects = [
        model.Project(p, f"p{p}", 1, gid)
        for gid, members in group_projects.items()
        for p in members
    ]
    assert len(projects) == n_projects
    groups = [model.Group(gid) for gid in group_projects]
    inst = model.Instance(
        budget=budget,
        projects=tuple(sorted(projects, key=lambda p: p.id)),
        groups=tuple(groups),
        labels=tuple(labels),
        tiebreak=tiebreak,
        allow_nonlaminar=allow_nonlaminar,
    )
    inst = model.validate_instance(inst)
    vs = tuple(model.make_vote(f"{i + 1}", e) for i, e in enumerate(votes))
    vs, _ = model.validate_profile(inst, vs)
    return Fixture(name, inst, vs, note)


def fixtures():
    """The executable counterexamples and the classifier showcase.

    - complement-lockin: the all-or-nothing bit lets a voter lock in a
      whole group; the pinned ranked-bundle tie-break isolates the one
      strictly profitable lie.
    - substitute-swap: pure substitutes; shifting one approval between
      singleton groups flips a tie, so lowest-index-sum tie-break is part
      of the construction.
    - overlapping-labels: two overlapping label constraints (not nested);
      truthful voting is no longer an equilibrium.
    - showcase: a compliant profile mixing an all-self-funded group with
      a two-chain substitutes group; nothing profitable here.
    """
    out = {}
    out["complement-lockin"] = _fixture(
        "complement-lockin",
        "a false all-or-nothing report flips the outcome to the liar's group",
        budget=3,
        n_projects=6,
        group_projects={1: (1, 2, 3), 2: (4, 5, 6)},
        votes=[
            {1: (2, {1, 2}, 0), 2: (1, {4}, 0)},
            {1: (2, {1, 2}, 0), 2: (1, {4}, 0)},
            {1: (1, {3}, 0), 2: (2, {5, 6}, 0)},
        ],
        tiebreak=model.TieBreakPolicy(
            bundle_rule=model.RULE_CUSTOM,
            ranked_bundles=(frozenset({1, 2, 4}),),
        ),
    )
    out["substitute-swap"] = _fixture(
        "substitute-swap",
        "moving one approval between singleton groups flips an index-sum tie",
        budget=2,
        n_projects=10,
        group_projects={
            1: (1, 2, 3), 2: (4,), 3: (5,), 4: (6,),
            5: (7,), 6: (8,), 7: (9,), 8: (10,),
        },
        votes=[
            {1: (1, {1}, 0), 2: (1, {4}, 0)},
            {1: (1, {1, 3}, 0), 3: (1, {5}, 0)},
            {1: (1, {1, 3}, 0), 4: (1, {6}, 0)},
            {1: (1, {2, 3}, 0), 5: (1, {7}, 0)},
            {1: (1, {2, 3}, 0), 6: (1, {8}, 0)},
            {1: (1, {2}, 0), 7: (1, {9}, 0)},
            {1: (1, {3}, 0), 8: (1, {10}, 0)},
        ],
        tiebreak=model.TieBreakPolicy(bundle_rule=model.RULE_INDEX_SUM),
    )
    out["overlapping-labels"] = _fixture(
        "overlapping-labels",
        "overlapping (non-nested) funding labels break the equilibrium",
        budget=2,
        n_projects=3,
        group_projects={1: (1,), 2: (2,), 3: (3,)},
        votes=[
            {1: (1, {1}, 0), 3: (1, {3}, 0)},
            {3: (1, {3}, 0)},
            {1: (1, {1}, 0)},
        ],
        tiebreak=model.TieBreakPolicy(
            bundle_rule=model.RULE_CUSTOM,
            ranked_bundles=(frozenset({3}), frozenset({1, 2})),
        ),
        labels=(
            model.LabelNode(1, b_min=1, b_max=1, group_ids=(1, 3)),
            model.LabelNode(2, b_min=1, b_max=1, group_ids=(2, 3)),
        ),
        allow_nonlaminar=True,
    )
    out["showcase"] = _fixture(
        "showcase",
        "compliant profile: one self-funded group, one two-chain substitutes group",
        budget=4,
        n_projects=9,
        group_projects={1: (1, 2, 3), 2: (4, 5, 6, 7, 8, 9)},
        votes=[
            {1: (2, {1, 2}, 0), 2: (1, {4, 5, 6}, 0)},
            {1: (2, {2, 3}, 0), 2: (1, {4, 5}, 0)},
            {1: (1, {2}, 0), 2: (2, {7, 8, 9}, 0)},
            {1: (1, {3}, 0), 2: (2, {8, 9}, 0)},
        ],
        tiebreak=model.DEFAULT_POLICY,
    )
    return out
