"""Individually rational scheduling across organizations."""

from .core import (
    MAKESPAN,
    SUM_COMPLETION,
    Instance,
    JobRef,
    ObjectiveKind,
    OptResult,
    Organization,
    Placement,
    Schedule,
)
from .dp import dp_makespan, dp_sumc
from .ilp import fpt_makespan
from .local import compute_local_optima
from .oracle import decide, solve_exact

__all__ = [
    "MAKESPAN", "SUM_COMPLETION", "Instance", "JobRef", "ObjectiveKind", "OptResult",
    "Organization", "Placement", "Schedule", "compute_local_optima", "decide",
    "dp_makespan", "dp_sumc", "fpt_makespan", "solve_exact",
]
