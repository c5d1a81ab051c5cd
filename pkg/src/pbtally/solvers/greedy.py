"""Two-pass greedy tally for unit-cost instances.

Pass 1 walks the label tree bottom-up and tops every node up to its
declared minimum, always taking the candidate with the best marginal
welfare that keeps every node's declared maximum intact.  Pass 2 fills
the outcome up to B projects the same way (optionally stopping once
marginals hit zero).  Optimal for profiles of independent or
substitute-chain structure with at most one deviant vote; a warning is
attached otherwise.
"""

from ..errors import Infeasible, NotUnitCost
from ..model import build_label_tree, priority_rank, social_welfare, tree_nodes
from .result import GREEDY, build_result


def solve_greedy(instance, votes, pad=True, dispatch=None):
    """Greedy tally; requires every project cost to be 1."""
    if not instance.unit_cost():
        raise NotUnitCost("greedy requires unit costs")
    root = build_label_tree(instance)
    nodes = tree_nodes(root)
    gm = instance.group_map()
    rank = priority_rank(instance)
    B = instance.budget

    group_of = {}
    for g in instance.groups:
        for pid in g.project_ids:
            group_of[pid] = g
    membership = {nd.id: nd.members for nd in nodes}

    chosen = set()

    def addable(pid):
        if pid in chosen or len(chosen) + 1 > B:
            return False
        g = group_of[pid]
        if g.contradictory and len(chosen & set(g.project_ids)) + 1 > g.cap:
            return False
        for nd in nodes:
            if pid in membership[nd.id] and len(chosen & membership[nd.id]) + 1 > nd.b_max:
                return False
        return True

    def best_candidate(pool):
        """(project, marginal welfare) maximizing the marginal, or None."""
        base = social_welfare(instance, votes, chosen)
        best = None
        for pid in pool:
            gain = social_welfare(instance, votes, chosen | {pid}) - base
            key = (-gain, rank[pid])
            if best is None or key < best[0]:
                best = (key, pid, gain)
        return None if best is None else (best[1], best[2])

    # pass 1: satisfy minima, deepest nodes first
    for nd in sorted(nodes, key=lambda n: (-n.depth, n.id)):
        while len(chosen & membership[nd.id]) < nd.b_min:
            pool = [p for p in sorted(membership[nd.id] - chosen) if addable(p)]
            pick = best_candidate(pool)
            if pick is None:
                raise Infeasible(f"cannot reach the minimum of label {nd.id}", entity=nd.id)
            chosen.add(pick[0])

    # pass 2: fill up to B projects
    while len(chosen) < B:
        pool = [p for p in sorted(group_of) if addable(p)]
        pick = best_candidate(pool)
        if pick is None:
            break
        if not pad and pick[1] <= 0:
            break
        chosen.add(pick[0])

    warnings = []
    from .. import profiles

    report = profiles.classify(instance, votes)
    if report.compliant_with_k_deviants is None or report.compliant_with_k_deviants > 1:
        warnings.append(
            "profile is outside the independent/substitute-chain class by more than "
            "one vote; greedy welfare is not guaranteed optimal"
        )
    return build_result(instance, votes, frozenset(chosen), GREEDY, warnings=warnings, dispatch=dispatch)
