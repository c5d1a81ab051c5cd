"""Seeded random instance and profile generators for property suites.

Everything is deterministic in (params, seed): RNGs are seeded with
strings derived from the seed, so results do not depend on interpreter
hash randomization.  Instances are drawn, validated, and checked for
feasibility; draws that fail are resampled up to an attempt cap.

Profile kinds:

- general: arbitrary valid votes (occasional all-or-nothing bits).
- structured: per group, either every voter self-funds their approvals
  (f equals the approved cost) or approvals are prefixes of a hidden
  per-subgroup order; the hidden structure is returned alongside.
- singleton: instance kind; every project is its own group.
- complements: structured votes with at least one all-or-nothing bit
  flipped on, so classification must reject the profile.
"""

import random
from dataclasses import dataclass
from itertools import count

from . import model
from .errors import GenerationFailed, PBError

KIND_GENERAL = "general"
KIND_STRUCTURED = "structured"
KIND_SINGLETON = "singleton"
KIND_COMPLEMENTS = "complements"
KINDS = (KIND_GENERAL, KIND_STRUCTURED, KIND_SINGLETON, KIND_COMPLEMENTS)

# accepted spellings for CLI/back-compat; canonical names are KINDS
KIND_ALIASES = {"def3": KIND_STRUCTURED, "singletons": KIND_SINGLETON}


def normalize_kind(name):
    k = KIND_ALIASES.get(name.lower(), name.lower())
    if k not in KINDS:
        raise ValueError(f"unknown profile kind {name!r}; choose from {', '.join(KINDS)}")
    return k


@dataclass(frozen=True)
class GenParams:
    seed: int = 0
    projects: tuple = (3, 8)  # m range, inclusive
    voters: tuple = (1, 4)
    groups: tuple = (1, 3)
    cost: tuple = (1, 1)
    budget: tuple = (2, 6)
    tree_depth: tuple = (0, 2)
    branching: tuple = (2, 3)
    bound_tightness: float = 0.5  # probability a label carries nontrivial bounds
    kind: str = KIND_GENERAL
    weight: tuple = (1, 1)
    attempts: int = 200


def _split(rng, items, k):
    """Partition items into min(k, len) nonempty parts, order preserved."""
    items = list(items)
    k = max(1, min(k, len(items)))
    cuts = sorted(rng.sample(range(1, len(items)), k - 1)) if k > 1 else []
    parts = []
    prev = 0
    for c in cuts + [len(items)]:
        parts.append(items[prev:c])
        prev = c
    return parts


def _draw_instance(rng, params):
    m = rng.randint(*params.projects)
    budget = rng.randint(*params.budget)
    pids = list(range(1, m + 1))

    if params.kind == KIND_SINGLETON:
        chunks = [[p] for p in pids]
    else:
        shuffled = list(pids)
        rng.shuffle(shuffled)
        chunks = _split(rng, shuffled, rng.randint(*params.groups))
        if params.kind == KIND_COMPLEMENTS and max(len(c) for c in chunks) < 2:
            return None  # the bit needs a multi-project group to act on

    projects = []
    groups = []
    for gi, members in enumerate(chunks, start=1):
        kind = model.STANDARD
        cap = None
        if (
            params.kind in (KIND_GENERAL, KIND_STRUCTURED)
            and len(members) >= 2
            and rng.random() < 0.2
        ):
            kind = model.CONTRADICTORY
            cap = 1
        groups.append(model.Group(gi, kind=kind, max_approvals=cap))
        for p in sorted(members):
            projects.append(model.Project(p, f"p{p}", rng.randint(*params.cost), gi))

    labels = []
    depth = rng.randint(*params.tree_depth)
    if depth > 0 and len(groups) >= 2:
        ids = count(1)
        cost_of_group = {
            g.id: sum(p.cost for p in projects if p.group_id == g.id) for g in groups
        }
        leaf_label = {}

        def bounds_for(group_ids):
            total = min(budget, sum(cost_of_group[g] for g in group_ids))
            if rng.random() >= params.bound_tightness:
                return 0, None
            lo = rng.randint(0, total)
            hi = rng.randint(lo, total)
            return lo, hi

        def build(group_ids, d, parent):
            nid = next(ids)
            lo, hi = bounds_for(group_ids)
            labels.append(model.LabelNode(nid, parent_id=parent, b_min=lo, b_max=hi))
            if d == 0 or len(group_ids) == 1:
                for g in group_ids:
                    leaf_label[g] = nid
                return
            for part in _split(rng, group_ids, rng.randint(*params.branching)):
                build(part, d - 1, nid)

        for part in _split(rng, [g.id for g in groups], rng.randint(*params.branching)):
            build(part, depth - 1, None)
        groups = [
            model.Group(g.id, g.kind, g.max_approvals, label_id=leaf_label.get(g.id))
            for g in groups
        ]

    return model.Instance(
        budget=budget,
        projects=tuple(projects),
        groups=tuple(groups),
        labels=tuple(labels),
        tiebreak=model.DEFAULT_POLICY,
    )


def gen_instance(params):
    """Draw a valid, feasible instance; deterministic in params.seed."""
    for attempt in range(params.attempts):
        rng = random.Random(f"{params.seed}:instance:{attempt}")
        inst = _draw_instance(rng, params)
        if inst is None:
            continue
        try:
            inst = model.validate_instance(inst)
        except PBError:
            continue
        if model.check_feasibility(inst):
            return inst
    raise GenerationFailed(
        f"no feasible instance within {params.attempts} attempts for seed {params.seed}"
    )


def _structure_plan(rng, instance):
    """Hidden per-group truth: self-funded, or subgroup orders."""
    plan = {}
    for g in instance.groups:
        if g.contradictory:
            plan[g.id] = ("contradictory",)
        elif rng.random() < 0.5:
            plan[g.id] = ("independent",)
        else:
            members = list(g.project_ids)
            rng.shuffle(members)
            parts = _split(rng, members, rng.randint(1, len(members)))
            plan[g.id] = ("chains", tuple(tuple(p) for p in parts))
    return plan


def _draw_entry(rng, instance, group, remaining, kind, plan):
    pm = instance.project_map()
    members = sorted(group.project_ids)

    def cost(s):
        return sum(pm[p].cost for p in s)

    if group.contradictory:
        size = rng.randint(1, min(group.cap, len(members)))
        s = frozenset(rng.sample(members, size))
        f = min(remaining, max(1, cost(s)))
        return model.VoteEntry(rng.randint(1, f), s, 0)

    if kind in (KIND_STRUCTURED, KIND_COMPLEMENTS):
        how = plan[group.id]
        if how[0] == "independent":
            rng.shuffle(members)
            s = []
            for p in members:
                if cost(s) + pm[p].cost > remaining or rng.random() < 0.4:
                    continue
                s.append(p)
            if not s:
                return None
            return model.VoteEntry(cost(s), frozenset(s), 0)
        order = rng.choice(how[1])
        take = rng.randint(1, len(order))
        return model.VoteEntry(rng.randint(1, remaining), frozenset(order[:take]), 0)

    size = rng.randint(1, len(members))
    s = frozenset(rng.sample(members, size))
    f = rng.randint(1, min(remaining, max(1, cost(s))))
    bit = 1 if kind == KIND_GENERAL and size >= 2 and rng.random() < 0.25 else 0
    return model.VoteEntry(f, s, bit)


def gen_profile_with_truth(instance, params):
    """(votes, hidden structure) for the instance; deterministic in seed."""
    rng = random.Random(f"{params.seed}:profile")
    kind = params.kind
    plan = _structure_plan(rng, instance) if kind in (KIND_STRUCTURED, KIND_COMPLEMENTS) else {}
    n = rng.randint(*params.voters)
    votes = []
    for i in range(n):
        entries = {}
        remaining = instance.budget
        order = list(instance.groups)
        rng.shuffle(order)
        for g in order:
            if remaining < 1 or rng.random() < 0.3:
                continue
            e = _draw_entry(rng, instance, g, remaining, kind, plan)
            if e is None:
                continue
            entries[g.id] = e
            remaining -= e.funds
        votes.append(model.make_vote(f"{i + 1}", entries, weight=rng.randint(*params.weight)))

    if kind == KIND_COMPLEMENTS:
        votes = _force_complement_bit(rng, instance, votes)
    votes, _ = model.validate_profile(instance, votes)
    return list(votes), plan


def _force_complement_bit(rng, instance, votes):
    gm = instance.group_map()
    spots = [
        (vi, gid)
        for vi, v in enumerate(votes)
        for gid, e in v.entries
        if not gm[gid].contradictory and len(e.approvals) >= 2
    ]
    if spots:
        vi, gid = rng.choice(spots)
        v = votes[vi]
        flipped = tuple(
            (g, model.VoteEntry(e.funds, e.approvals, 1) if g == gid else e)
            for g, e in v.entries
        )
        votes[vi] = model.Vote(v.voter_id, flipped, v.weight)
        return votes
    # no multi-approval entry drawn: overwrite one vote with a minimal bit-setter
    g = next(g for g in instance.groups if not g.contradictory and len(g.project_ids) >= 2)
    s = frozenset(sorted(g.project_ids)[:2])
    f = min(instance.budget, instance.cost_of(s))
    if votes:
        votes[0] = model.make_vote(votes[0].voter_id, {g.id: (f, s, 1)}, weight=votes[0].weight)
    else:
        votes.append(model.make_vote("1", {g.id: (f, s, 1)}))
    return votes


def gen_profile(instance, params):
    """Votes only; see gen_profile_with_truth."""
    return gen_profile_with_truth(instance, params)[0]


def inject_deviant(instance, votes, seed):
    """Replace one vote with an unconstrained (bit-free) random vote.

    Returns (votes, voter_id of the replaced vote); the deviant ignores
    any profile structure but still validates.
    """
    votes = list(votes)
    if not votes:
        return votes, None
    rng = random.Random(f"{seed}:deviant")
    i = rng.randrange(len(votes))
    old = votes[i]
    pm = instance.project_map()
    entries = {}
    remaining = instance.budget
    order = list(instance.groups)
    rng.shuffle(order)
    for g in order:
        if remaining < 1 or rng.random() < 0.4:
            continue
        members = sorted(g.project_ids)
        size = rng.randint(1, min(g.cap, len(members)))
        s = frozenset(rng.sample(members, size))
        cost = sum(pm[p].cost for p in s)
        f = rng.randint(1, min(remaining, max(1, cost)))
        entries[g.id] = model.VoteEntry(f, s, 0)
        remaining -= f
    votes[i] = model.make_vote(old.voter_id, entries, weight=old.weight)
    votes[i], _ = model.validate_vote(instance, votes[i])
    return votes, old.voter_id
