"""Optimal local schedules: each organization alone on its own machines."""

from __future__ import annotations

from typing import Sequence

from .core import (
    MAKESPAN,
    Instance,
    JobRef,
    LocalOptima,
    ObjectiveKind,
    Placement,
    Schedule,
)
from .errors import ResourceLimitError

DEFAULT_STATE_CAP = 5_000_000


def _lpt(machine_count: int, jobs: Sequence[int]) -> tuple[int, list[int]]:
    """Longest-processing-time list schedule; returns (makespan, machine per job)."""
    loads = [0] * machine_count
    where = [0] * len(jobs)
    for j in sorted(range(len(jobs)), key=lambda j: (-jobs[j], j)):
        d = min(range(machine_count), key=lambda d: (loads[d], d))
        loads[d] += jobs[j]
        where[j] = d
    return max(loads), where


def _schedule_from_assignment(jobs: Sequence[int], where: Sequence[int]) -> Schedule:
    t: dict[int, int] = {}
    entries = []
    for j, d in enumerate(where):
        t[d] = t.get(d, 0) + jobs[j]
        entries.append((JobRef(1, j + 1), Placement(d + 1, t[d])))
    return Schedule(tuple(entries))


def opt_local_makespan(machine_count: int, jobs: Sequence[int],
                       state_cap: int = DEFAULT_STATE_CAP) -> tuple[int, Schedule]:
    """Minimum makespan of ``jobs`` on ``machine_count`` identical machines.

    Dynamic program over reachable machine-load vectors, one layer per job.
    Load vectors are kept sorted because the machines are identical, and states
    whose largest load exceeds the LPT makespan are dropped since they can never
    beat it.  When LPT already meets the trivial lower bound it is returned
    directly.  The schedule uses organization index 1 and machines
    ``1..machine_count``.
    """
    if machine_count < 1:
        raise ValueError("machine_count must be >= 1")
    jobs = [int(p) for p in jobs]
    if not jobs:
        return 0, Schedule()
    ub, lpt_where = _lpt(machine_count, jobs)
    lb = max(max(jobs), -(-sum(jobs) // machine_count))
    if ub == lb:
        return ub, _schedule_from_assignment(jobs, lpt_where)

    order = sorted(range(len(jobs)), key=lambda j: (-jobs[j], j))
    start = (0,) * machine_count
    layers: list[dict[tuple[int, ...], tuple[tuple[int, ...], int]]] = [{start: (start, -1)}]
    total = 0
    for j in order:
        p = jobs[j]
        nxt: dict[tuple[int, ...], tuple[tuple[int, ...], int]] = {}
        for state in layers[-1]:
            seen = set()
            for pos, z in enumerate(state):
                if z in seen:
                    continue
                seen.add(z)
                if z + p > ub:
                    continue
                new = list(state)
                new[pos] = z + p
                new.sort()
                key = tuple(new)
                if key not in nxt:
                    nxt[key] = (state, z)
        total += len(nxt)
        if total > state_cap:
            raise ResourceLimitError(f"local makespan DP exceeded {state_cap} states")
        layers.append(nxt)

    final = min(layers[-1], key=lambda s: (s[-1], s))
    # Walk predecessors back, then replay forward on concrete machines.
    loads_chosen = []
    state = final
    for layer in range(len(order), 0, -1):
        prev, z = layers[layer][state]
        loads_chosen.append(z)
        state = prev
    loads_chosen.reverse()
    machine_loads = [0] * machine_count
    where = [0] * len(jobs)
    for j, z in zip(order, loads_chosen):
        d = machine_loads.index(z)
        machine_loads[d] += jobs[j]
        where[j] = d
    return final[-1], _schedule_from_assignment(jobs, where)


def spt_schedule(machine_count: int, jobs: Sequence[int]) -> Schedule:
    """Shortest-processing-time list schedule, optimal for the sum of completions.

    Equal durations keep index order; equal loads go to the lowest machine.
    """
    if machine_count < 1:
        raise ValueError("machine_count must be >= 1")
    loads = [0] * machine_count
    entries = []
    for j in sorted(range(len(jobs)), key=lambda j: (jobs[j], j)):
        d = min(range(machine_count), key=lambda d: (loads[d], d))
        loads[d] += jobs[j]
        entries.append((JobRef(1, j + 1), Placement(d + 1, loads[d])))
    return Schedule(tuple(entries))


def spt_sum(machine_count: int, jobs: Sequence[int]) -> int:
    return sum(c for _, (_, c) in spt_schedule(machine_count, jobs).items())


def compute_local_optima(instance: Instance) -> LocalOptima:
    makespans, sumcs = [], []
    for org in instance.organizations:
        makespans.append(opt_local_makespan(org.machines, org.jobs)[0])
        sumcs.append(spt_sum(org.machines, org.jobs))
    return LocalOptima(tuple(makespans), tuple(sumcs))


def local_union_schedule(instance: Instance, kind: ObjectiveKind) -> Schedule:
    """Every organization runs its optimal local schedule on its own machines.

    Always feasible and individually rational for ``kind``.
    """
    entries = []
    for i, org in enumerate(instance.organizations, start=1):
        if kind is MAKESPAN:
            local = opt_local_makespan(org.machines, org.jobs)[1]
        else:
            local = spt_schedule(org.machines, org.jobs)
        offset = instance.machine_range(i).start - 1
        for (_, j), (machine, c) in local.items():
            entries.append((JobRef(i, j), Placement(machine + offset, c)))
    return Schedule(tuple(entries))
