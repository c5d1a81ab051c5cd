"""Error taxonomy shared by the library, CLI, and service.

Every error carries a stable ``code`` string used in structured CLI output
and in service error bodies.  Exit-code mapping for the CLI:

====  =========================================================
code  meaning
====  =========================================================
0     success
2     bad input (parse or validation failure)
3     instance admits no feasible outcome
4     capacity cap hit (input too big for the requested method)
====  =========================================================
"""

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_INFEASIBLE = 3
EXIT_CAPACITY = 4


class PBError(Exception):
    """Base class for all package errors.

    Parameters
    ----------
    message : str
        Human-readable description.
    entity : str or int or None
        Id of the offending object (project, group, label, voter) when
        one exists.
    """

    code = "Error"
    exit_code = EXIT_INVALID

    def __init__(self, message, entity=None):
        super().__init__(message)
        self.message = message
        self.entity = entity

    def to_dict(self):
        """Serialize for structured CLI output and service error bodies."""
        entity = self.entity if self.entity is None else str(self.entity)
        return {"code": self.code, "message": self.message, "entity": entity}


class ValidationError(PBError):
    """Malformed instance, vote, or file content."""

    code = "ValidationError"
    exit_code = EXIT_INVALID


class ParseError(ValidationError):
    code = "ParseError"


class DuplicateProject(ValidationError):
    code = "DuplicateProject"


class DuplicateId(ValidationError):
    """Duplicate group, label, or voter id."""

    code = "DuplicateId"


class UnknownId(ValidationError):
    code = "UnknownId"


class EmptyGroup(ValidationError):
    code = "EmptyGroup"


class NonPositiveCost(ValidationError):
    code = "NonPositiveCost"


class BoundsInverted(ValidationError):
    """Label with b_min > b_max."""

    code = "BoundsInverted"


class NotATree(ValidationError):
    """Cycle in label parent pointers."""

    code = "NotATree"


class NonLaminarLabels(ValidationError):
    """Label project sets that overlap without nesting."""

    code = "NonLaminarLabels"


class BudgetExceeded(ValidationError):
    """Vote whose group allocations sum above the instance budget."""

    code = "BudgetExceeded"


class NegativeAllocation(ValidationError):
    code = "NegativeAllocation"


class TooManyApprovalsInContradictoryGroup(ValidationError):
    code = "TooManyApprovalsInContradictoryGroup"


class NotUnitCost(ValidationError):
    """Solver requires every project cost to equal 1."""

    code = "NotUnitCost"


class Infeasible(PBError):
    """No outcome satisfies the budget and label constraints."""

    code = "Infeasible"
    exit_code = EXIT_INFEASIBLE


class CapacityError(PBError):
    """Input exceeds a size cap of the requested method."""

    code = "CapacityError"
    exit_code = EXIT_CAPACITY


class GroupTooLarge(CapacityError):
    """Group bigger than the subset-scan cap of the exact solver."""

    code = "GroupTooLarge"


class TooManyDistinctVotes(CapacityError):
    code = "TooManyDistinctVotes"


class InstanceTooLarge(CapacityError):
    """Too many projects for exhaustive enumeration."""

    code = "InstanceTooLarge"


class SpaceTooLarge(CapacityError):
    """Deviation space above the strategy lab's enumeration cap."""

    code = "SpaceTooLarge"


class GenerationFailed(CapacityError):
    """Random generation hit its resampling attempt cap."""

    code = "GenerationFailed"


class NoApplicableSolver(CapacityError):
    """Automatic dispatch found no method whose preconditions hold.

    The message names which precondition failed for each method so the
    caller can pick a forced mode deliberately.
    """

    code = "NoApplicableSolver"
