"""Tally for few distinct weighted votes on unit-cost instances.

Group tables are built without scanning all subsets of a group, so
groups may be large as long as the number of distinct votes is small.
Per group, every subset of its all-or-nothing voters is tried as the set
whose approval unions get funded outright ("cases"); the rest of the
group budget is then spent by exact enumeration over count vectors on
the approval-pattern classes of the remaining projects.  Case scores
never exceed true welfare and the best case realizes it, so the table
cells are welfare-exact and the tree DP on top returns the optimum.
"""

from itertools import product

from ..errors import NotUnitCost, TooManyDistinctVotes
from ..model import RULE_CUSTOM, cell_key, social_welfare
from .exact import _best_custom, pick_root_cell, tree_dp
from .result import DISTINCT, build_result

DEFAULT_DISTINCT_CAP = 10


def _case_tables(instance, group, votes, policy):
    """(spend, cardinality) -> (welfare, representative) for one group."""
    B = instance.budget
    cap = group.cap
    members = sorted(group.project_ids)
    comp_voters = []
    plain_voters = []
    for v in votes:
        e = v.entry(group.id)
        if e.funds <= 0:
            continue
        if e.complement and e.approvals:
            comp_voters.append((v.weight, e.funds, e.approvals))
        else:
            plain_voters.append((v.weight, e.funds, e.approvals))

    table = {}

    def consider(spend, score, rep):
        cell = (spend, spend)  # unit costs: cardinality equals spend
        cur = table.get(cell)
        if cur is None or score > cur[0] or (score == cur[0] and cell_key(policy, rep) < cell_key(policy, cur[1])):
            table[cell] = (score, rep)

    for mask in range(1 << len(comp_voters)):
        case = [comp_voters[i] for i in range(len(comp_voters)) if mask >> i & 1]
        funded = frozenset().union(*(s for _, _, s in case)) if case else frozenset()
        if len(funded) > min(B, cap):
            continue
        base = sum(w * min(f, len(s)) for w, f, s in case)
        rest = [p for p in members if p not in funded]
        classes = {}
        for p in rest:
            pattern = tuple(1 if p in s else 0 for _, _, s in plain_voters)
            classes.setdefault(pattern, []).append(p)
        keys = sorted(classes)
        sizes = [len(classes[k]) for k in keys]
        for counts in product(*(range(n + 1) for n in sizes)):
            total = len(funded) + sum(counts)
            if total > min(B, cap):
                continue
            score = base
            for vi, (w, f, s) in enumerate(plain_voters):
                hit = len(s & funded) + sum(x for k, x in zip(keys, counts) if k[vi])
                score += w * min(f, hit)
            rep = tuple(sorted(funded | {p for k, x in zip(keys, counts) for p in classes[k][:x]}))
            consider(total, score, rep)
    return table


def solve_distinct_votes(instance, votes, distinct_cap=DEFAULT_DISTINCT_CAP, workers=None, oracle_cap=20, dispatch=None):
    """Optimal tally in time exponential only in the number of distinct votes."""
    if not instance.unit_cost():
        raise NotUnitCost("the distinct-votes solver requires unit costs")
    if len(votes) > distinct_cap:
        raise TooManyDistinctVotes(f"{len(votes)} distinct votes, cap is {distinct_cap}")
    policy = instance.tiebreak

    def table_fn(group):
        return _case_tables(instance, group, votes, policy)

    root_table = tree_dp(instance, votes, workers=workers, group_table_fn=table_fn)
    welfare, rep = pick_root_cell(instance, root_table)
    if policy.bundle_rule == RULE_CUSTOM:
        q = _best_custom(instance, votes, welfare, oracle_cap)
    else:
        q = frozenset(rep)
    recomputed = social_welfare(instance, votes, q)
    assert recomputed == welfare, f"case-table welfare {welfare} disagrees with recomputation {recomputed}"
    return build_result(instance, votes, q, DISTINCT, dispatch=dispatch)
