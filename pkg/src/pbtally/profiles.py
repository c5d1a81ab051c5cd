"""Vote-profile classification.

A profile is compliant when every standard group is, in one of two ways:

- Independent: every voter allocates exactly the cost of their approval
  set (f = |s| under unit costs) and sets no all-or-nothing bit.
- SubstituteChains: the group's projects split into subgroups, each with
  a strict total order, and every voter approves a prefix of exactly one
  subgroup's order (fund allocations unconstrained).

Contradictory groups are compliant by construction.  Any all-or-nothing
bit in the profile makes it non-compliant.  The chain test is decided in
polynomial time: co-approved projects must share a subgroup, so the
connected components of the co-approval graph are the only candidate
partition, and prefix-of-one-order within a component is exactly
"distinct approval sets form an inclusion chain".
"""

from dataclasses import dataclass

from . import model


@dataclass(frozen=True)
class GroupVerdict:
    kind: str  # Contradictory | Independent | SubstituteChains | NonCompliant
    orders: tuple = ()  # SubstituteChains: one ordered tuple per subgroup
    reason: str = ""  # NonCompliant only


@dataclass(frozen=True)
class ComplianceReport:
    group_verdicts: tuple  # ((group_id, GroupVerdict), ...) sorted by group id
    deviant_voters: tuple = ()  # witness: removing these restores compliance
    compliant_with_k_deviants: int | None = 0  # None: no witness found

    @property
    def compliant(self):
        return all(v.kind != "NonCompliant" for _, v in self.group_verdicts)

    def verdict(self, group_id):
        for gid, v in self.group_verdicts:
            if gid == group_id:
                return v
        raise KeyError(group_id)


def _independent_verdict(instance, group, votes):
    pm = instance.project_map()
    for v in votes:
        e = v.entry(group.id)
        if e.funds == 0:
            continue
        if e.complement:
            return None
        if e.funds != sum(pm[p].cost for p in e.approvals):
            return None
    return GroupVerdict("Independent")


def _chain_verdict(instance, group, votes, rank):
    approval_sets = []
    for v in votes:
        e = v.entry(group.id)
        if e.funds == 0:
            continue
        if e.complement:
            return None
        if e.approvals:
            approval_sets.append(e.approvals)

    # connected components of the co-approval graph
    parent = {p: p for p in group.project_ids}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for s in approval_sets:
        ids = sorted(s)
        for other in ids[1:]:
            parent[find(other)] = find(ids[0])

    components = {}
    for p in group.project_ids:
        components.setdefault(find(p), set()).add(p)

    orders = []
    for comp in sorted(components.values(), key=min):
        sets_here = sorted(
            {frozenset(s) for s in approval_sets if s <= comp},
            key=len,
        )
        # every approval set lands inside one component by construction;
        # a set straddling components would have merged them
        chain = []
        prev = frozenset()
        for s in sets_here:
            if not prev <= s:
                return None  # incomparable approval sets: no chain order exists
            chain.extend(sorted(s - prev, key=lambda p: rank[p]))
            prev = s
        chain.extend(sorted(comp - prev, key=lambda p: rank[p]))
        orders.append(tuple(chain))
    verdict = GroupVerdict("SubstituteChains", orders=tuple(orders))
    # self-certification: the witness must actually cover every voter
    if not chains_hold(group, votes, verdict.orders):
        return None
    return verdict


def chains_hold(group, votes, orders):
    """Re-check the prefix property of a chain witness against every voter."""
    for v in votes:
        e = v.entry(group.id)
        if e.funds == 0 or not e.approvals:
            continue
        homes = [o for o in orders if e.approvals <= set(o)]
        if not any(frozenset(o[: len(e.approvals)]) == e.approvals for o in homes):
            return False
    return True


def classify(instance, votes, witness_search=True):
    """Per-group verdicts plus a deviant-voter witness when not compliant."""
    rank = model.priority_rank(instance)
    verdicts = []
    for g in instance.groups:
        if g.contradictory:
            verdicts.append((g.id, GroupVerdict("Contradictory")))
            continue
        v = _independent_verdict(instance, g, votes)
        if v is None:
            v = _chain_verdict(instance, g, votes, rank)
        if v is None:
            reason = "approval sets are neither uniformly self-funded nor prefix chains"
            if any(vt.entry(g.id).complement and vt.entry(g.id).funds > 0 for vt in votes):
                reason = "a vote sets the all-or-nothing bit"
            v = GroupVerdict("NonCompliant", reason=reason)
        verdicts.append((g.id, v))
    report = ComplianceReport(tuple(verdicts))
    if report.compliant or not witness_search:
        return report

    deviants = _greedy_witness(instance, votes, rank)
    return ComplianceReport(
        tuple(verdicts),
        deviant_voters=tuple(deviants) if deviants is not None else (),
        compliant_with_k_deviants=len(deviants) if deviants is not None else None,
    )


def _noncompliant_count(instance, votes, rank):
    n = 0
    for g in instance.groups:
        if g.contradictory:
            continue
        if _independent_verdict(instance, g, votes) is None and _chain_verdict(instance, g, votes, rank) is None:
            n += 1
    return n


def _greedy_witness(instance, votes, rank):
    """Small (not minimum) voter set whose removal restores compliance."""
    votes = list(votes)
    removed = []
    while votes:
        if _noncompliant_count(instance, votes, rank) == 0:
            return removed
        best = None
        for i, v in enumerate(votes):
            rest = votes[:i] + votes[i + 1 :]
            score = (_noncompliant_count(instance, rest, rank), i)
            if best is None or score < best[0]:
                best = (score, i, v)
        removed.append(best[2].voter_id)
        votes.pop(best[1])
    return removed if _noncompliant_count(instance, votes, rank) == 0 else None


def deviant_witness(instance, votes, max_deviants=1):
    """First voter subset of size <= max_deviants whose removal yields compliance.

    Subsets are tried in deterministic order (size, then voter positions);
    empty result means no witness within the bound.
    """
    from itertools import combinations

    rank = model.priority_rank(instance)
    votes = list(votes)
    if _noncompliant_count(instance, votes, rank) == 0:
        return []
    for size in range(1, max_deviants + 1):
        for combo in combinations(range(len(votes)), size):
            rest = [v for i, v in enumerate(votes) if i not in combo]
            if _noncompliant_count(instance, rest, rank) == 0:
                return [votes[i].voter_id for i in combo]
    return []
