"""Exponential dynamic programs over machine-load vectors.

dp_makespan is polynomial for a fixed number of machines; dp_sumc for a fixed
number of machines and maximum duration.  Both keep one predecessor pointer
per reachable state and rebuild a schedule by replaying the chosen loads.
"""

from __future__ import annotations

import heapq
from collections import defaultdict

from .core import (
    Instance,
    JobRef,
    LocalOptima,
    OptResult,
    Placement,
    Schedule,
    compute_phases,
)
from .errors import ResourceLimitError
from .local import compute_local_optima

DEFAULT_STATE_CAP = 2_000_000


def _replay(instance: Instance, steps) -> Schedule:
    """Turn (ref, load-before) pairs into a schedule, lowest machine first."""
    load = [0] * instance.m
    entries = []
    for ref, z in steps:
        d = load.index(z)
        load[d] += instance.duration(ref)
        entries.append((ref, Placement(d + 1, load[d])))
    return Schedule(tuple(entries))


def dp_makespan(instance: Instance, local: LocalOptima | None = None,
                state_cap: int = DEFAULT_STATE_CAP, merge: bool = True) -> OptResult:
    """Optimal individually rational makespan.

    Jobs are processed phase by phase; a job may only go where it finishes by
    its phase deadline.  Testing just the updated machine suffices because
    deadlines never decrease along the processing order.  ``merge=False``
    keeps duplicate states apart (one per machine-indexed load vector and
    path) and exists to cross-check the merged run.
    """
    local = local or compute_local_optima(instance)
    phases = compute_phases(instance, local)
    order = sorted(instance.job_refs(),
                   key=lambda r: (phases.phase_of(r), -instance.duration(r), r.org, r.job))
    m = instance.m
    start = (0,) * m
    # layer: list of (state, parent index, load chosen); dict for dedupe
    layers = [[(start, -1, 0)]]
    total = 1
    for ref in order:
        p = instance.duration(ref)
        deadline = phases.deadline(phases.phase_of(ref))
        seen: dict[tuple[int, ...], int] = {}
        nxt = []
        for idx, (state, _, _) in enumerate(layers[-1]):
            tried = set()
            for pos, z in enumerate(state):
                if merge and z in tried:
                    continue
                tried.add(z)
                if z + p > deadline:
                    continue
                new = list(state)
                new[pos] = z + p
                if merge:
                    key = tuple(sorted(new))
                    if key in seen:
                        continue
                    seen[key] = len(nxt)
                else:
                    key = tuple(new)
                nxt.append((key, idx, z))
        total += len(nxt)
        if total > state_cap:
            raise ResourceLimitError(f"dp_makespan exceeded {state_cap} states")
        layers.append(nxt)

    # The union of local optima always survives, so the last layer is nonempty.
    best = min(range(len(layers[-1])), key=lambda i: (max(layers[-1][i][0], default=0), i))
    value = max(layers[-1][best][0], default=0)
    chosen = []
    idx = best
    for layer in range(len(order), 0, -1):
        _, parent, z = layers[layer][idx]
        chosen.append(z)
        idx = parent
    chosen.reverse()
    schedule = _replay(instance, zip(order, chosen))
    return OptResult(value, schedule, True, {"states": total})


def _spt_total(loads, durations) -> int:
    heap = list(loads)
    heapq.heapify(heap)
    s = 0
    for p in durations:
        c = heapq.heappop(heap) + p
        s += c
        heapq.heappush(heap, c)
    return s


def estimate_sumc_states(instance: Instance) -> int:
    """Crude upper estimate of dp_sumc's state space, used to pick a solver."""
    counts = defaultdict(int)
    for ref in instance.job_refs():
        counts[(ref.org, instance.duration(ref))] += 1
    est = 1
    for c in counts.values():
        est *= c + 1
    # sorted load vectors: multisets of m values out of Σp + 1
    span = instance.total_work + 1
    loads = 1
    for i in range(min(instance.m, instance.n)):
        loads = loads * (span + i) // (i + 1)
    return est * loads


def dp_sumc(instance: Instance, local: LocalOptima | None = None,
            state_cap: int = DEFAULT_STATE_CAP) -> OptResult:
    """Optimal individually rational sum of completion times.

    A state is (sorted machine loads, completion sum per organization, jobs
    placed per (organization, duration) type).  A transition appends one job
    to a machine.  States that already break an organization's local optimum,
    or cannot finish within it even under SPT on the current loads, are
    dropped, as are states whose SPT bound exceeds the union of local optima.
    These cuts never remove an optimal state.
    """
    local = local or compute_local_optima(instance)
    k, m = instance.k, instance.m
    members: dict[tuple[int, int], list[int]] = defaultdict(list)
    for ref in instance.job_refs():
        members[(instance.duration(ref), ref.org)].append(ref.job)
    keys = sorted(members)
    full = tuple(len(members[t]) for t in keys)
    limits = local.sumcs
    upper = sum(limits)

    def hopeless(loads, sums, counts) -> bool:
        per_org: list[list[int]] = [[] for _ in range(k)]
        every = []
        for a, (p, o) in enumerate(keys):
            left = full[a] - counts[a]
            if left:
                per_org[o - 1].extend([p] * left)
                every.extend([p] * left)
        for o in range(k):
            if per_org[o] and sums[o] + _spt_total(loads, per_org[o]) > limits[o]:
                return True
        return sum(sums) + _spt_total(loads, every) > upper

    start = ((0,) * m, (0,) * k, (0,) * len(keys))
    layers: list[dict] = [{start: None}]
    total = 1
    for _ in range(instance.n):
        nxt: dict = {}
        for state in layers[-1]:
            loads, sums, counts = state
            for a, (p, o) in enumerate(keys):
                if counts[a] == full[a]:
                    continue
                new_counts = counts[:a] + (counts[a] + 1,) + counts[a + 1:]
                tried = set()
                for pos, z in enumerate(loads):
                    if z in tried:
                        continue
                    tried.add(z)
                    c = z + p
                    if sums[o - 1] + c > limits[o - 1]:
                        continue
                    new_sums = sums[:o - 1] + (sums[o - 1] + c,) + sums[o:]
                    new_loads = tuple(sorted(loads[:pos] + (c,) + loads[pos + 1:]))
                    key = (new_loads, new_sums, new_counts)
                    if key in nxt:
                        continue
                    if hopeless(new_loads, new_sums, new_counts):
                        continue
                    nxt[key] = (state, z, a)
        total += len(nxt)
        if total > state_cap:
            raise ResourceLimitError(f"dp_sumc exceeded {state_cap} states")
        layers.append(nxt)

    final = min(layers[-1], key=lambda s: (sum(s[1]), s))
    value = sum(final[1])
    steps = []
    state = final
    for layer in range(instance.n, 0, -1):
        prev, z, a = layers[layer][state]
        steps.append((z, a))
        state = prev
    steps.reverse()
    used = [0] * len(keys)
    replay = []
    for z, a in steps:
        p, o = keys[a]
        replay.append((JobRef(o, members[keys[a]][used[a]]), z))
        used[a] += 1
    return OptResult(value, _replay(instance, replay), True, {"states": total})
