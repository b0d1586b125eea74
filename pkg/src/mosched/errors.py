"""Exception types shared by the solvers and the command line."""

from __future__ import annotations


class MoschedError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(MoschedError, ValueError):
    """An instance, gadget source or file violates a structural invariant."""


class MalformedScheduleError(MoschedError, ValueError):
    """A schedule does not describe the jobs of its instance.

    This is distinct from an infeasible schedule: a malformed schedule is missing
    jobs, names unknown jobs or uses a machine outside ``1..m``.
    """


class InfeasibleScheduleError(MoschedError, ValueError):
    """An operation that requires a feasible schedule received an infeasible one."""


class ResourceLimitError(MoschedError):
    """A state or node cap was hit before the computation could finish."""

    reason = "resource_limit"


class BudgetExceededError(ResourceLimitError):
    """The branch-and-bound node budget ran out.

    ``incumbent`` holds the best schedule found so far (an ``OptResult`` with
    ``proven_optimal=False``), so callers can still report something useful.
    """

    reason = "budget_exceeded"

    def __init__(self, message: str, incumbent=None, nodes: int = 0):
        super().__init__(message)
        self.incumbent = incumbent
        self.nodes = nodes
