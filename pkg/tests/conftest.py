"""Shared builders and independent reference implementations.

The reference evaluators below re-derive feasibility, utility, and
group scoring straight from the definitions, with their own data
structures and iteration orders, so solver tests compare two genuinely
separate implementations rather than one implementation with itself.
"""

import random

import pytest

from pbtally import model, strategy


# ---------------------------------------------------------------------------
# builders


def make_instance(budget, groups, costs=None, kinds=None, labels=(), tiebreak=None,
                  label_of=None, allow_nonlaminar=False):
    """Validated instance from {group_id: [project ids]} plus options."""
    costs = costs or {}
    kinds = kinds or {}
    label_of = label_of or {}
    projects = []
    built = []
    for gid in sorted(groups):
        for pid in groups[gid]:
            projects.append(model.Project(pid, f"p{pid}", costs.get(pid, 1), gid))
        kind = kinds.get(gid, model.STANDARD)
        cap = 1 if kind == model.CONTRADICTORY else None
        built.append(model.Group(gid, kind=kind, max_approvals=cap,
                                 label_id=label_of.get(gid)))
    inst = model.Instance(
        budget=budget,
        projects=tuple(projects),
        groups=tuple(built),
        labels=tuple(labels),
        tiebreak=tiebreak or model.DEFAULT_POLICY,
        allow_nonlaminar=allow_nonlaminar,
    )
    return model.validate_instance(inst)


def profile(*entry_maps, weights=None):
    """Votes with voter ids "1", "2", ... built from entry maps."""
    weights = weights or {}
    return [
        model.make_vote(str(i), entries, weight=weights.get(i, 1))
        for i, entries in enumerate(entry_maps, start=1)
    ]


def expand_weights(votes):
    """Weight-w vote -> w unit-weight copies with fresh voter ids."""
    out = []
    for v in votes:
        for k in range(v.weight):
            out.append(model.Vote(f"{v.voter_id}#{k}", v.entries, 1))
    return out


@pytest.fixture(scope="session")
def fixtures():
    return strategy.fixtures()


# ---------------------------------------------------------------------------
# independent reference implementations


def reference_members(instance):
    """Label id -> constrained project ids, derived a second way."""
    of_group = {g.id: set(g.project_ids) for g in instance.groups}
    kids = {}
    for lab in instance.labels:
        kids.setdefault(lab.parent_id, []).append(lab.id)
    attached = {}
    for g in instance.groups:
        attached.setdefault(g.label_id, []).append(g.id)
    labmap = {lab.id: lab for lab in instance.labels}

    def mem(lid):
        lab = labmap[lid]
        if lab.group_ids is not None:
            out = set()
            for gid in lab.group_ids:
                out |= of_group[gid]
            return out
        out = set()
        for gid in attached.get(lid, []):
            out |= of_group[gid]
        for child in kids.get(lid, []):
            out |= mem(child)
        return out

    return {lab.id: mem(lab.id) for lab in instance.labels}


def reference_feasible(instance, ids):
    """Budget plus every label window, each checked directly."""
    ids = set(ids)
    cost = {p.id: p.cost for p in instance.projects}
    if sum(cost[i] for i in ids) > instance.budget:
        return False
    members = reference_members(instance)
    for lab in instance.labels:
        spend = sum(cost[i] for i in ids & members[lab.id])
        hi = instance.budget if lab.b_max is None else lab.b_max
        if not lab.b_min <= spend <= hi:
            return False
    return True


def reference_caps_ok(instance, ids):
    """Contradictory groups keep at most their cap in the outcome."""
    ids = set(ids)
    for g in instance.groups:
        if g.kind == model.CONTRADICTORY:
            cap = 1 if g.max_approvals is None else g.max_approvals
            if len(ids & set(g.project_ids)) > cap:
                return False
    return True


def reference_utility(instance, vote, ids):
    """Per-group saturated overlap with the all-or-nothing gate."""
    ids = set(ids)
    cost = {p.id: p.cost for p in instance.projects}
    total = 0
    for _, e in vote.entries:
        overlap = sum(cost[p] for p in ids & set(e.approvals))
        gain = min(e.funds, overlap)
        if e.complement and not set(e.approvals) <= ids:
            gain = 0
        total += gain
    return total


def reference_welfare(instance, votes, ids):
    return sum(v.weight * reference_utility(instance, v, ids) for v in votes)


def reference_best_subset(instance, group, votes, b):
    """Reference for best_group_subset: reversed scan order."""
    cost = {p.id: p.cost for p in instance.projects}
    pids = sorted(group.project_ids, reverse=True)
    cap = group.cap
    best = None
    for mask in range((1 << len(pids)) - 1, -1, -1):
        sub = frozenset(pids[i] for i in range(len(pids)) if mask >> i & 1)
        if len(sub) > cap or sum(cost[p] for p in sub) > b:
            continue
        w = 0
        for v in votes:
            e = v.entry(group.id)
            if e.funds <= 0:
                continue
            gain = min(e.funds, sum(cost[p] for p in sub & e.approvals))
            if e.complement and not set(e.approvals) <= sub:
                gain = 0
            w += v.weight * gain
        key = (-w, model.bundle_key(instance.tiebreak, sub))
        if best is None or key < best[0]:
            best = (key, sub, w)
    return best[1], best[2]


def random_subsets(instance, seed, n):
    """n random project subsets, not necessarily feasible."""
    rng = random.Random(f"{seed}:subsets")
    pids = [p.id for p in instance.projects]
    out = []
    for _ in range(n):
        out.append(frozenset(p for p in pids if rng.random() < 0.5))
    return out
