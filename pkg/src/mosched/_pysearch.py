"""Pure-Python branch-and-bound kernels.

``_csearch.pyx`` is a line-by-line port of this file; keep the two in step.
Both kernels return ``(status, best, path, nodes)`` where status 0 means the
search finished and 1 means the node budget ran out.  ``path`` is None when no
solution better than the initial ``best`` was found.
"""

import heapq

DONE = 0
OUT_OF_BUDGET = 1


def makespan_search(m, dur, dl, blk, best, budget, pruning, first):
    """Place jobs one by one on ``m`` machines, every job before its deadline.

    Jobs arrive sorted by deadline and grouped into blocks of identical copies
    (same duration and deadline).  Within a block the copies go to
    non-decreasing positions of the block-start machine order, and machines
    that started the block with equal load receive non-increasing counts.
    ``path[d]`` is the machine of job ``d``.
    """
    n = len(dur)
    load = [0] * m
    cur = [0] * n
    orders = {}
    sames = {}
    cnts = {}
    # work of jobs d.. up to the end of d's deadline group
    grp_rem = [0] * (n + 1)
    for d in range(n - 1, -1, -1):
        same_grp = d + 1 < n and dl[d + 1] == dl[d]
        grp_rem[d] = dur[d] + (grp_rem[d + 1] if same_grp else 0)
    suffix = [0] * (n + 1)
    for d in range(n - 1, -1, -1):
        suffix[d] = suffix[d + 1] + dur[d]
    state = {"best": best, "path": None, "nodes": 0, "status": DONE, "stop": False}

    def slack(cap):
        s = 0
        for x in load:
            if cap > x:
                s += cap - x
        return s

    def rec(d, minpos):
        if d == n:
            v = max(load) if m else 0
            if v < state["best"]:
                state["best"] = v
                state["path"] = list(cur)
                if first:
                    state["stop"] = True
            return
        if pruning:
            cap = min(dl[d], state["best"] - 1)
            if slack(cap) < grp_rem[d] or slack(state["best"] - 1) < suffix[d]:
                return
        b = blk[d]
        if d == 0 or blk[d - 1] != b:
            orders[b] = sorted(range(m), key=lambda i: (load[i], i))
            sames[b] = [p > 0 and load[orders[b][p]] == load[orders[b][p - 1]]
                        for p in range(m)]
            cnts[b] = [0] * m
            minpos = 0
        order, same, cnt = orders[b], sames[b], cnts[b]
        p = dur[d]
        for pos in range(minpos, m):
            if pruning and same[pos] and cnt[pos] + 1 > cnt[pos - 1]:
                continue
            mc = order[pos]
            nl = load[mc] + p
            if nl > dl[d]:
                continue
            if pruning and nl >= state["best"]:
                continue
            state["nodes"] += 1
            if state["nodes"] > budget:
                state["status"] = OUT_OF_BUDGET
                state["stop"] = True
                return
            load[mc] = nl
            cnt[pos] += 1
            cur[d] = mc
            rec(d + 1, pos if pruning else 0)
            cnt[pos] -= 1
            load[mc] = nl - p
            if state["stop"]:
                return

    rec(0, 0)
    return state["status"], state["best"], state["path"], state["nodes"]


def _spt_bound(loads, durs):
    """Minimum total completion of ``durs`` (ascending) on machines free at ``loads``."""
    heap = list(loads)
    heapq.heapify(heap)
    total = 0
    for p in durs:
        c = heapq.heappop(heap) + p
        total += c
        heapq.heappush(heap, c)
    return total


def sumc_search(m, t_org, t_dur, t_cnt, limits, best, budget, pruning, first):
    """Enumerate left-justified schedules event by event.

    The open machine with least load (lowest index on ties) acts next: it
    either runs one more job of some type or closes for good.  Types are
    (organization, duration) pairs sorted by duration; action ``len(types)``
    is close.  Consecutive events at the same load must use non-decreasing
    actions, which removes relabelings of equally loaded machines.
    ``path`` lists ``(machine, action)`` pairs.
    """
    ntypes = len(t_dur)
    k = len(limits)
    cnt = list(t_cnt)
    load = [0] * m
    is_open = [True] * m
    sum_o = [0] * k
    path = []
    state = {"best": best, "path": None, "nodes": 0, "status": DONE, "stop": False,
             "remaining": sum(cnt), "nopen": m}

    def bounds_ok(total):
        loads = [load[i] for i in range(m) if is_open[i]]
        per_org = [[] for _ in range(k)]
        every = []
        for a in range(ntypes):
            if cnt[a]:
                per_org[t_org[a]].extend([t_dur[a]] * cnt[a])
                every.extend([t_dur[a]] * cnt[a])
        for o in range(k):
            if per_org[o] and sum_o[o] + _spt_bound(loads, per_org[o]) > limits[o]:
                return False
        every.sort()
        return total + _spt_bound(loads, every) < state["best"]

    def rec(total, last_z, last_a):
        if state["remaining"] == 0:
            if total < state["best"]:
                state["best"] = total
                state["path"] = list(path)
                if first:
                    state["stop"] = True
            return
        mc = -1
        for i in range(m):
            if is_open[i] and (mc < 0 or load[i] < load[mc]):
                mc = i
        z = load[mc]
        min_a = last_a if (pruning and z == last_z) else 0
        for a in range(min_a, ntypes + 1):
            if a < ntypes:
                if cnt[a] == 0:
                    continue
                o = t_org[a]
                c = z + t_dur[a]
                if sum_o[o] + c > limits[o]:
                    continue
                if pruning and total + c >= state["best"]:
                    continue
            elif state["nopen"] <= 1:
                continue
            state["nodes"] += 1
            if state["nodes"] > budget:
                state["status"] = OUT_OF_BUDGET
                state["stop"] = True
                return
            path.append((mc, a))
            if a < ntypes:
                cnt[a] -= 1
                load[mc] = c
                sum_o[o] += c
                state["remaining"] -= 1
                if not pruning or bounds_ok(total + c):
                    rec(total + c, z, a)
                state["remaining"] += 1
                sum_o[o] -= c
                load[mc] = z
                cnt[a] += 1
            else:
                is_open[mc] = False
                state["nopen"] -= 1
                rec(total, z, a)
                state["nopen"] += 1
                is_open[mc] = True
            path.pop()
            if state["stop"]:
                return

    rec(0, -1, 0)
    return state["status"], state["best"], state["path"], state["nodes"]
