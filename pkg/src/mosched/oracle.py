"""Exact reference solvers by branch-and-bound over left-justified schedules.

Makespan search assigns jobs to machines in order of their organization's
local makespan (the order of a well-ordered schedule); each job must complete
by that local makespan.  Sum-of-completions search builds machine sequences
event by event, since job order on a machine matters for individual
rationality.  Both start from the union of the local optima, which is always
individually rational.
"""

from __future__ import annotations

import os
import sys
from collections import defaultdict

from . import _backend
from .core import (
    MAKESPAN,
    Instance,
    JobRef,
    LocalOptima,
    ObjectiveKind,
    OptResult,
    Placement,
    Schedule,
)
from .errors import BudgetExceededError
from .local import compute_local_optima, local_union_schedule

DEFAULT_BUDGET = 10**8


def default_budget() -> int:
    raw = os.environ.get("MOSCHED_NODE_BUDGET")
    return int(raw) if raw else DEFAULT_BUDGET


def makespan_lower_bound(instance: Instance) -> int:
    return max(instance.pmax, -(-instance.total_work // instance.m))


def _makespan_jobs(instance: Instance, local: LocalOptima):
    jobs = []
    for ref in instance.job_refs():
        jobs.append((local.makespans[ref.org - 1], -instance.duration(ref), ref))
    jobs.sort()
    refs = [r for _, _, r in jobs]
    dur = [-p for _, p, _ in jobs]
    dl = [L for L, _, _ in jobs]
    blk, b = [], -1
    for d in range(len(jobs)):
        if d == 0 or (dl[d], dur[d]) != (dl[d - 1], dur[d - 1]):
            b += 1
        blk.append(b)
    return refs, dur, dl, blk


def _sumc_types(instance: Instance):
    """Job types (org, duration) sorted by duration, with the job indices of each."""
    members: dict[tuple[int, int], list[int]] = defaultdict(list)
    for ref in instance.job_refs():
        members[(instance.duration(ref), ref.org)].append(ref.job)
    keys = sorted(members)
    return keys, [members[key] for key in keys]


def _run(instance, kind, local, best, budget, pruning, first, backend):
    kern = _backend.kernels(backend)
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 4 * instance.n + 1000))
    if kind is MAKESPAN:
        refs, dur, dl, blk = _makespan_jobs(instance, local)
        status, value, path, nodes = kern.makespan_search(
            instance.m, dur, dl, blk, best, budget, pruning, first)
        schedule = None
        if path is not None:
            seqs: dict[int, list] = defaultdict(list)
            for ref, mc in zip(refs, path):
                seqs[mc + 1].append(ref)
            schedule = Schedule.from_sequences(instance, seqs)
        return status, value, schedule, nodes

    keys, members = _sumc_types(instance)
    t_dur = [p for p, _ in keys]
    t_org = [o - 1 for _, o in keys]
    t_cnt = [len(js) for js in members]
    status, value, path, nodes = kern.sumc_search(
        instance.m, t_org, t_dur, t_cnt, list(local.sumcs), best, budget, pruning, first)
    schedule = None
    if path is not None:
        load = [0] * instance.m
        nxt = [0] * len(keys)
        entries = []
        for mc, a in path:
            if a == len(keys):
                continue
            load[mc] += t_dur[a]
            ref = JobRef(t_org[a] + 1, members[a][nxt[a]])
            nxt[a] += 1
            entries.append((ref, Placement(mc + 1, load[mc])))
        schedule = Schedule(tuple(entries))
    return status, value, schedule, nodes


def solve_exact(instance: Instance, kind: ObjectiveKind | str,
                local: LocalOptima | None = None, budget: int | None = None,
                *, pruning: bool = True, backend: str | None = None) -> OptResult:
    """Minimum objective over individually rational schedules.

    Raises BudgetExceededError (carrying the best schedule found so far) when
    more than ``budget`` search nodes are expanded.  ``pruning=False`` turns off
    the bounds and symmetry breaking; it exists for cross-checking.
    """
    kind = ObjectiveKind.parse(kind)
    local = local or compute_local_optima(instance)
    budget = default_budget() if budget is None else budget
    fallback = local_union_schedule(instance, kind)
    start = max(local.makespans) if kind is MAKESPAN else sum(local.sumcs)
    if kind is MAKESPAN and pruning and start == makespan_lower_bound(instance):
        return OptResult(start, fallback, True, {"nodes": 0})
    status, value, schedule, nodes = _run(instance, kind, local, start, budget,
                                          pruning, False, backend)
    if schedule is None:
        value, schedule = start, fallback
    if status != _backend._pysearch.DONE:
        raise BudgetExceededError(
            f"node budget {budget} exhausted",
            incumbent=OptResult(value, schedule, False, {"nodes": nodes}), nodes=nodes)
    return OptResult(value, schedule, True, {"nodes": nodes})


def decide(instance: Instance, kind: ObjectiveKind | str, local: LocalOptima | None = None,
           target: int = 0, budget: int | None = None, *, pruning: bool = True,
           backend: str | None = None, witness: list | None = None) -> bool:
    """Is there an individually rational schedule with objective at most ``target``?

    Stops at the first witness; if ``witness`` is a list the schedule is
    appended to it.
    """
    kind = ObjectiveKind.parse(kind)
    local = local or compute_local_optima(instance)
    budget = default_budget() if budget is None else budget
    start = max(local.makespans) if kind is MAKESPAN else sum(local.sumcs)
    if target >= start:
        if witness is not None:
            witness.append(local_union_schedule(instance, kind))
        return True
    if kind is MAKESPAN and target < makespan_lower_bound(instance):
        return False
    status, _, schedule, nodes = _run(instance, kind, local, target + 1, budget,
                                      pruning, True, backend)
    if schedule is not None:
        if witness is not None:
            witness.append(schedule)
        return True
    if status != _backend._pysearch.DONE:
        raise BudgetExceededError(f"node budget {budget} exhausted", nodes=nodes)
    return False
