"""Exhaustive reference solver.

Enumerates every feasible outcome (budget, label bounds, contradictory
caps) and maximizes social welfare under the instance's bundle tie-break.
The reference every faster solver and every strategic claim is checked
against; refuses instances with more than ``cap`` projects.
"""

from .errors import Infeasible, InstanceTooLarge
from .model import bundle_key, is_feasible_outcome, label_memberships, respects_group_caps, social_welfare
from .solvers.result import ORACLE, build_result

DEFAULT_CAP = 20


def enumerate_feasible(instance, cap=DEFAULT_CAP, prune=True):
    """Yield every feasible outcome exactly once, lexicographically.

    Order is ascending over sorted-id sequences with prefixes first:
    (), (1,), (1,2), ..., (2,), (2,3), ...  With ``prune`` off, all 2^m
    subsets are filtered individually (validation mode for the pruner).
    """
    pids = sorted(p.id for p in instance.projects)
    if len(pids) > cap:
        raise InstanceTooLarge(f"{len(pids)} projects, enumeration cap is {cap}")
    if not prune:
        for q in _subsets_lex(pids):
            if is_feasible_outcome(instance, q) and respects_group_caps(instance, q):
                yield frozenset(q)
        return

    pm = instance.project_map()
    B = instance.budget
    members = label_memberships(instance)
    labels = []
    for lab in instance.labels:
        bmax = min(lab.b_max, B) if lab.b_max is not None else B
        labels.append((lab.b_min, bmax, members[lab.id]))
    group_of = {p.id: instance.group_map()[p.group_id] for p in instance.projects}
    # per label, cost still available from position i onward
    remaining = [[0] * (len(pids) + 1) for _ in labels]
    for li, (_, _, mem) in enumerate(labels):
        for i in range(len(pids) - 1, -1, -1):
            c = pm[pids[i]].cost if pids[i] in mem else 0
            remaining[li][i] = remaining[li][i + 1] + c

    chosen = []
    spend = [0] * len(labels)
    counts = {}

    def mins_ok(i):
        for li, (lo, _, _) in enumerate(labels):
            if spend[li] + remaining[li][i] < lo:
                return False
        return True

    def rec(i, total):
        if all(lo <= spend[li] for li, (lo, _, _) in enumerate(labels)):
            yield frozenset(chosen)
        for j in range(i, len(pids)):
            pid = pids[j]
            c = pm[pid].cost
            if total + c > B:
                continue
            g = group_of[pid]
            if counts.get(g.id, 0) + 1 > g.cap:
                continue
            ok = True
            for li, (_, hi, mem) in enumerate(labels):
                if pid in mem and spend[li] + c > hi:
                    ok = False
                    break
            if not ok:
                continue
            chosen.append(pid)
            counts[g.id] = counts.get(g.id, 0) + 1
            for li, (_, _, mem) in enumerate(labels):
                if pid in mem:
                    spend[li] += c
            if mins_ok(j + 1):
                yield from rec(j + 1, total + c)
            for li, (_, _, mem) in enumerate(labels):
                if pid in mem:
                    spend[li] -= c
            counts[g.id] -= 1
            chosen.pop()

    if mins_ok(0):
        yield from rec(0, 0)


def _subsets_lex(pids):
    chosen = []

    def rec(i):
        yield tuple(chosen)
        for j in range(i, len(pids)):
            chosen.append(pids[j])
            yield from rec(j + 1)
            chosen.pop()

    yield from rec(0)


def best_outcome(instance, votes, cap=DEFAULT_CAP):
    """(outcome frozenset, welfare) maximizing welfare with the bundle tie-break."""
    policy = instance.tiebreak
    best = None
    for q in enumerate_feasible(instance, cap=cap):
        w = social_welfare(instance, votes, q)
        key = (-w, bundle_key(policy, q))
        if best is None or key < best[0]:
            best = (key, q, w)
    if best is None:
        raise Infeasible("no outcome satisfies the funding constraints")
    return best[1], best[2]


def solve_oracle(instance, votes, cap=DEFAULT_CAP, dispatch=None):
    """Brute-force tally; the ground truth for every other solver."""
    q, _ = best_outcome(instance, votes, cap=cap)
    return build_result(instance, votes, q, ORACLE, dispatch=dispatch)
