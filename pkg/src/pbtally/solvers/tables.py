"""Per-group subset scoring tables.

The exact solver reduces each group to a table of its best subsets: the
subset-local part of the utility formula depends only on the outcome's
intersection with the group, so groups can be scored independently and
composed along the label tree.
"""

from dataclasses import dataclass

from ..errors import GroupTooLarge
from ..model import bundle_key, cell_key

DEFAULT_SMAX_CAP = 16


def group_entries(group, votes):
    """(weight, funds, approvals, complement) for every vote touching the group."""
    out = []
    for v in votes:
        e = v.entry(group.id)
        if e.funds > 0:
            out.append((v.weight, e.funds, e.approvals, e.complement))
    return out


def subset_welfare(entries, costs, subset):
    """Weighted welfare contribution of implementing exactly ``subset``."""
    total = 0
    for weight, funds, approvals, comp in entries:
        inter_cost = sum(costs[p] for p in subset & approvals)
        gain = min(funds, inter_cost)
        if comp and not approvals <= subset:
            gain = 0
        total += weight * gain
    return total


def iter_group_subsets(instance, group, smax_cap=DEFAULT_SMAX_CAP):
    """All implementable subsets of the group (contradictory cap honored)."""
    pids = sorted(group.project_ids)
    if len(pids) > smax_cap:
        raise GroupTooLarge(
            f"group {group.id} has {len(pids)} projects, subset-scan cap is {smax_cap}",
            entity=group.id,
        )
    cap = group.cap
    for mask in range(1 << len(pids)):
        subset = frozenset(pids[i] for i in range(len(pids)) if mask >> i & 1)
        if len(subset) <= cap:
            yield subset


def exact_group_table(instance, group, votes, policy, smax_cap=DEFAULT_SMAX_CAP):
    """Map (exact spend, cardinality) -> (best welfare, representative).

    Representatives are sorted id tuples, minimal under the composable
    cell key among welfare-maximal subsets of the cell.
    """
    costs = {p.id: p.cost for p in instance.projects}
    entries = group_entries(group, votes)
    B = instance.budget
    table = {}
    for subset in iter_group_subsets(instance, group, smax_cap):
        spend = sum(costs[p] for p in subset)
        if spend > B:
            continue
        w = subset_welfare(entries, costs, subset)
        rep = tuple(sorted(subset))
        cell = (spend, len(subset))
        cur = table.get(cell)
        if cur is None or w > cur[0] or (w == cur[0] and cell_key(policy, rep) < cell_key(policy, cur[1])):
            table[cell] = (w, rep)
    return table


@dataclass(frozen=True)
class GroupTable:
    """Best subset of one group per funding level b, cost at most b."""

    group_id: int
    rows: tuple  # rows[b] = (subset tuple, welfare), b in 0..len(rows)-1


def build_group_table(instance, group, votes, policy=None, smax_cap=DEFAULT_SMAX_CAP):
    policy = policy if policy is not None else instance.tiebreak
    costs = {p.id: p.cost for p in instance.projects}
    top = min(instance.budget, sum(costs[p] for p in group.project_ids))
    exact = exact_group_table(instance, group, votes, policy, smax_cap)
    rows = []
    best = (0, ())  # empty subset is always available at b = 0
    by_spend = {}
    for (spend, _), (w, rep) in sorted(exact.items()):
        cur = by_spend.get(spend)
        if cur is None or w > cur[0] or (w == cur[0] and bundle_key(policy, rep) < bundle_key(policy, cur[1])):
            by_spend[spend] = (w, rep)
    for b in range(top + 1):
        cand = by_spend.get(b)
        if cand is not None:
            w, rep = cand
            if w > best[0] or (w == best[0] and bundle_key(policy, rep) < bundle_key(policy, best[1])):
                best = (w, rep)
        rows.append((best[1], best[0]))
    return GroupTable(group.id, tuple(rows))


def best_group_subset(instance, group, votes, b, policy=None, smax_cap=DEFAULT_SMAX_CAP):
    """Welfare-maximal subset of the group costing at most b.

    Ties resolved by the bundle rule; contradictory groups never yield
    more than their cap.
    """
    policy = policy if policy is not None else instance.tiebreak
    costs = {p.id: p.cost for p in instance.projects}
    entries = group_entries(group, votes)
    best = None
    for subset in iter_group_subsets(instance, group, smax_cap):
        if sum(costs[p] for p in subset) > b:
            continue
        w = subset_welfare(entries, costs, subset)
        key = (-w, bundle_key(policy, subset))
        if best is None or key < best[0]:
            best = (key, subset, w)
    return best[1], best[2]
