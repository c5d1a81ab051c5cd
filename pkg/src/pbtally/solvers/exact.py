"""Exact tally: dynamic program over the label tree.

Each group is reduced to a table of its best subsets per (exact spend,
cardinality) cell; tables are composed bottom-up with knapsack
convolution and each tree node masks out spends violating its bounds.
Cells carry a representative outcome, minimal under the bundle rule
among welfare-maximal outcomes of the cell; keying cells by cardinality
as well as spend is what makes those representatives composable, so the
final pick matches the brute-force oracle bundle for bundle.

The custom bundle rule does not compose across unions; for it the DP
supplies the optimal welfare and the winner is chosen among co-optimal
outcomes by direct enumeration.  Instances whose labelling is not
nested cannot be arranged into a tree at all and fall back to scored
enumeration as well.
"""

from concurrent.futures import ThreadPoolExecutor

from ..errors import Infeasible, NonLaminarLabels
from ..model import RULE_CUSTOM, build_label_tree, bundle_key, cell_key, social_welfare
from .result import EXACT, build_result
from .tables import DEFAULT_SMAX_CAP, exact_group_table


def _feasible(instance, cap):
    from .. import oracle  # lazy: oracle builds results via this package

    return oracle.enumerate_feasible(instance, cap=cap)


def _convolve(instance, policy, left, right):
    B = instance.budget
    out = {}
    for (s1, k1), (w1, r1) in sorted(left.items()):
        for (s2, k2), (w2, r2) in sorted(right.items()):
            s = s1 + s2
            if s > B:
                continue
            cell = (s, k1 + k2)
            w = w1 + w2
            rep = tuple(sorted(r1 + r2))
            cur = out.get(cell)
            if cur is None or w > cur[0] or (w == cur[0] and cell_key(policy, rep) < cell_key(policy, cur[1])):
                out[cell] = (w, rep)
    return out


def _mask(table, node):
    return {cell: v for cell, v in table.items() if node.b_min <= cell[0] <= node.b_max}


def tree_dp(instance, votes, smax_cap=DEFAULT_SMAX_CAP, workers=None, group_table_fn=None):
    """Run the label-tree DP; returns the masked root table.

    ``group_table_fn(group)`` supplies per-group (spend, cardinality)
    tables; defaults to the exhaustive subset scan.
    """
    policy = instance.tiebreak
    root = build_label_tree(instance)
    gm = instance.group_map()
    if group_table_fn is None:
        def group_table_fn(group):
            return exact_group_table(instance, group, votes, policy, smax_cap)

    gids = sorted(gm)
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            tables = dict(zip(gids, pool.map(lambda gid: group_table_fn(gm[gid]), gids)))
    else:
        tables = {gid: group_table_fn(gm[gid]) for gid in gids}

    def fold(node):
        acc = {(0, 0): (0, ())}
        for gid in node.group_ids:
            acc = _convolve(instance, policy, acc, tables[gid])
        for child in node.children:
            acc = _convolve(instance, policy, acc, fold(child))
        return _mask(acc, node)

    return fold(root)


def pick_root_cell(instance, root_table):
    """(welfare, representative) best over the root table, bundle rule applied."""
    policy = instance.tiebreak
    best = None
    for cell, (w, rep) in sorted(root_table.items()):
        key = (-w, bundle_key(policy, rep))
        if best is None or key < best[0]:
            best = (key, w, rep)
    if best is None:
        raise Infeasible("funding constraints exclude every outcome")
    return best[1], best[2]


def solve_exact(instance, votes, smax_cap=DEFAULT_SMAX_CAP, workers=None, oracle_cap=20, dispatch=None):
    """Maximum-welfare outcome under all funding constraints."""
    policy = instance.tiebreak
    try:
        build_label_tree(instance)
    except NonLaminarLabels:
        # no tree to run the DP on; fall back to scored enumeration
        q, _ = _best_by_enumeration(instance, votes, oracle_cap)
        return build_result(
            instance, votes, q, EXACT,
            warnings=("label sets overlap without nesting; exhaustive enumeration used",),
            dispatch=dispatch,
        )
    root_table = tree_dp(instance, votes, smax_cap=smax_cap, workers=workers)
    welfare, rep = pick_root_cell(instance, root_table)
    if policy.bundle_rule == RULE_CUSTOM:
        # the DP welfare is exact; re-pick the bundle among co-optimal outcomes
        q = _best_custom(instance, votes, welfare, oracle_cap)
    else:
        q = frozenset(rep)
    return build_result(instance, votes, q, EXACT, dispatch=dispatch)


def _best_by_enumeration(instance, votes, cap):
    policy = instance.tiebreak
    best = None
    for q in _feasible(instance, cap):
        w = social_welfare(instance, votes, q)
        key = (-w, bundle_key(policy, q))
        if best is None or key < best[0]:
            best = (key, q, w)
    if best is None:
        raise Infeasible("funding constraints exclude every outcome")
    return best[1], best[2]


def _best_custom(instance, votes, target_welfare, cap):
    policy = instance.tiebreak
    best = None
    for q in _feasible(instance, cap):
        if social_welfare(instance, votes, q) != target_welfare:
            continue
        key = bundle_key(policy, q)
        if best is None or key < best[0]:
            best = (key, q)
    if best is None:
        raise Infeasible("funding constraints exclude every outcome")
    return best[1]
