"""Aggregation solvers and the mode dispatcher.

`solve` picks a method per the documented contract:

- auto: the greedy method when its optimality preconditions hold (unit
  costs, nested labels, no all-or-nothing bits, and a profile that is
  compliant after removing at most one voter); otherwise the exact tree
  DP when every group fits under the subset cap; otherwise the call is
  rejected with guidance rather than silently approximated.
- greedy | exact | distinct | oracle: force that method; its own
  preconditions still apply and raise on violation.
"""

from .. import model, profiles
from ..errors import NoApplicableSolver
from .distinct import DEFAULT_DISTINCT_CAP, solve_distinct_votes
from .exact import solve_exact, tree_dp, pick_root_cell
from .greedy import solve_greedy
from .result import DISTINCT, EXACT, GREEDY, ORACLE, TallyResult, build_result
from .tables import (
    DEFAULT_SMAX_CAP,
    GroupTable,
    best_group_subset,
    build_group_table,
    exact_group_table,
)

MODES = ("auto", "greedy", "exact", "distinct", "oracle")


def _greedy_applicable(instance, votes):
    """(ok, why-not) for the greedy optimality preconditions."""
    if not instance.unit_cost():
        return False, "costs are not all 1"
    if not model.is_laminar(instance):
        return False, "label sets overlap without nesting"
    for v in votes:
        for _, e in v.entries:
            if e.complement:
                return False, f"voter {v.voter_id} sets an all-or-nothing bit"
    report = profiles.classify(instance, votes)
    k = report.compliant_with_k_deviants
    if k is None:
        return False, "profile is not compliant for any small deviant set"
    if k > 1:
        return False, f"profile needs {k} deviant removals to be compliant"
    return True, f"{k} deviant(s)"


def solve(
    instance,
    votes,
    mode="auto",
    smax_cap=DEFAULT_SMAX_CAP,
    distinct_cap=DEFAULT_DISTINCT_CAP,
    oracle_cap=20,
    workers=None,
    pad=True,
):
    """Tally a profile, dispatching on `mode`.

    Returns a TallyResult; raises NoApplicableSolver when mode is auto
    and no method's preconditions hold.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "greedy":
        return solve_greedy(instance, votes, pad=pad, dispatch="forced: greedy")
    if mode == "exact":
        return solve_exact(
            instance, votes, smax_cap=smax_cap, workers=workers,
            oracle_cap=oracle_cap, dispatch="forced: exact",
        )
    if mode == "distinct":
        return solve_distinct_votes(
            instance, votes, distinct_cap=distinct_cap, workers=workers,
            oracle_cap=oracle_cap, dispatch="forced: distinct",
        )
    if mode == "oracle":
        from .. import oracle

        return oracle.solve_oracle(instance, votes, cap=oracle_cap, dispatch="forced: oracle")

    ok, note = _greedy_applicable(instance, votes)
    if ok:
        return solve_greedy(instance, votes, pad=pad, dispatch=f"auto: greedy ({note})")
    biggest = max((len(g.project_ids) for g in instance.groups), default=0)
    if biggest <= smax_cap:
        return solve_exact(
            instance, votes, smax_cap=smax_cap, workers=workers,
            oracle_cap=oracle_cap, dispatch=f"auto: exact (greedy ruled out: {note})",
        )
    raise NoApplicableSolver(
        f"no method applies: greedy ruled out ({note}); largest group has "
        f"{biggest} projects, over the subset cap {smax_cap}. Raise the cap, "
        f"or force --mode distinct (unit costs, few distinct votes) or "
        f"--mode oracle (small instances)."
    )
