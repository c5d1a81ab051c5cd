"""Shared tally result type."""

from dataclasses import dataclass

from .. import model

GREEDY = "Greedy"
EXACT = "ExactTreeDP"
DISTINCT = "DistinctVotes"
ORACLE = "Oracle"


@dataclass(frozen=True)
class TallyResult:
    outcome: model.Outcome
    spend: int
    social_welfare: int
    per_voter_utility: dict  # voter id (str) -> unweighted utility
    solver: str
    compliance: object  # profiles.ComplianceReport
    warnings: tuple = ()
    dispatch: str | None = None  # why this solver ran


def build_result(instance, votes, selected, solver, warnings=(), dispatch=None):
    """Assemble a TallyResult, recomputing welfare and utilities from scratch."""
    from .. import profiles  # local import, profiles depends on model only

    outcome = model.Outcome.of(selected)
    per_voter = {v.voter_id: model.utility(instance, v, outcome) for v in votes}
    welfare = sum(v.weight * per_voter[v.voter_id] for v in votes)
    return TallyResult(
        outcome=outcome,
        spend=instance.cost_of(outcome.selected),
        social_welfare=welfare,
        per_voter_utility=per_voter,
        solver=solver,
        compliance=profiles.classify(instance, votes),
        warnings=tuple(warnings),
        dispatch=dispatch,
    )
