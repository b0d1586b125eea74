# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled branch-and-bound kernels; same algorithms and results as _pysearch."""

from libc.stdlib cimport malloc, calloc, free

ctypedef long long i64

DONE = 0
OUT_OF_BUDGET = 1


cdef struct MkCtx:
    int m
    int n
    i64 *dur
    i64 *dl
    int *blk
    i64 *load
    int *cur
    int *best_path
    int have_path
    i64 *grp_rem
    i64 *suffix
    int *order      # n_blocks x m
    char *same      # n_blocks x m
    int *cnt        # n_blocks x m
    i64 best
    long long nodes
    long long budget
    int pruning
    int first
    int status
    int stop


cdef inline i64 _slack(MkCtx *c, i64 cap):
    cdef i64 s = 0
    cdef int i
    for i in range(c.m):
        if cap > c.load[i]:
            s += cap - c.load[i]
    return s


cdef void _mk_rec(MkCtx *c, int d, int minpos):
    cdef int i, j, pos, mc, b, key_i
    cdef i64 v, nl, p, cap
    cdef int *order
    cdef char *same
    cdef int *cnt
    if d == c.n:
        v = 0
        for i in range(c.m):
            if c.load[i] > v:
                v = c.load[i]
        if v < c.best:
            c.best = v
            for i in range(c.n):
                c.best_path[i] = c.cur[i]
            c.have_path = 1
            if c.first:
                c.stop = 1
        return
    if c.pruning:
        cap = c.dl[d] if c.dl[d] < c.best - 1 else c.best - 1
        if _slack(c, cap) < c.grp_rem[d] or _slack(c, c.best - 1) < c.suffix[d]:
            return
    b = c.blk[d]
    order = c.order + b * c.m
    same = c.same + b * c.m
    cnt = c.cnt + b * c.m
    if d == 0 or c.blk[d - 1] != b:
        # stable insertion sort of machines by (load, index)
        for i in range(c.m):
            key_i = i
            j = i - 1
            while j >= 0 and c.load[order[j]] > c.load[key_i]:
                order[j + 1] = order[j]
                j -= 1
            order[j + 1] = key_i
        for i in range(c.m):
            same[i] = 1 if (i > 0 and c.load[order[i]] == c.load[order[i - 1]]) else 0
            cnt[i] = 0
        minpos = 0
    p = c.dur[d]
    for pos in range(minpos, c.m):
        if c.pruning and same[pos] and cnt[pos] + 1 > cnt[pos - 1]:
            continue
        mc = order[pos]
        nl = c.load[mc] + p
        if nl > c.dl[d]:
            continue
        if c.pruning and nl >= c.best:
            continue
        c.nodes += 1
        if c.nodes > c.budget:
            c.status = OUT_OF_BUDGET
            c.stop = 1
            return
        c.load[mc] = nl
        cnt[pos] += 1
        c.cur[d] = mc
        _mk_rec(c, d + 1, pos if c.pruning else 0)
        cnt[pos] -= 1
        c.load[mc] = nl - p
        if c.stop:
            return


def makespan_search(int m, dur, dl, blk, best, budget, pruning, first):
    cdef MkCtx c
    cdef int n = len(dur)
    cdef int d, nb
    nb = (max(blk) + 1) if n else 0
    c.m = m
    c.n = n
    c.dur = <i64 *> malloc((n + 1) * sizeof(i64))
    c.dl = <i64 *> malloc((n + 1) * sizeof(i64))
    c.blk = <int *> malloc((n + 1) * sizeof(int))
    c.load = <i64 *> calloc(m, sizeof(i64))
    c.cur = <int *> calloc(n + 1, sizeof(int))
    c.best_path = <int *> calloc(n + 1, sizeof(int))
    c.grp_rem = <i64 *> calloc(n + 1, sizeof(i64))
    c.suffix = <i64 *> calloc(n + 1, sizeof(i64))
    c.order = <int *> calloc((nb + 1) * m, sizeof(int))
    c.same = <char *> calloc((nb + 1) * m, sizeof(char))
    c.cnt = <int *> calloc((nb + 1) * m, sizeof(int))
    try:
        for d in range(n):
            c.dur[d] = dur[d]
            c.dl[d] = dl[d]
            c.blk[d] = blk[d]
        for d in range(n - 1, -1, -1):
            c.suffix[d] = c.suffix[d + 1] + c.dur[d]
            if d + 1 < n and c.dl[d + 1] == c.dl[d]:
                c.grp_rem[d] = c.dur[d] + c.grp_rem[d + 1]
            else:
                c.grp_rem[d] = c.dur[d]
        c.have_path = 0
        c.best = best
        c.nodes = 0
        c.budget = budget
        c.pruning = 1 if pruning else 0
        c.first = 1 if first else 0
        c.status = DONE
        c.stop = 0
        _mk_rec(&c, 0, 0)
        path = [c.best_path[d] for d in range(n)] if c.have_path else None
        return c.status, c.best, path, c.nodes
    finally:
        free(c.dur); free(c.dl); free(c.blk); free(c.load); free(c.cur)
        free(c.best_path); free(c.grp_rem); free(c.suffix)
        free(c.order); free(c.same); free(c.cnt)


cdef struct ScCtx:
    int m
    int ntypes
    int k
    int *t_org
    i64 *t_dur
    int *cnt
    i64 *limits
    i64 *load
    char *is_open
    i64 *sum_o
    i64 *scratch    # m loads for the SPT bound
    int *path_mc
    int *path_a
    int depth
    int *best_mc
    int *best_a
    int best_len
    int have_path
    i64 best
    long long nodes
    long long budget
    int remaining
    int nopen
    int pruning
    int first
    int status
    int stop


cdef i64 _spt_bound(ScCtx *c, int org):
    """SPT completion total of the remaining jobs (of ``org``, or all if -1)."""
    cdef int nl = 0, i, a, r, best_i
    cdef i64 total = 0, cc
    for i in range(c.m):
        if c.is_open[i]:
            c.scratch[nl] = c.load[i]
            nl += 1
    for a in range(c.ntypes):
        if c.cnt[a] == 0 or (org >= 0 and c.t_org[a] != org):
            continue
        for r in range(c.cnt[a]):
            best_i = 0
            for i in range(1, nl):
                if c.scratch[i] < c.scratch[best_i]:
                    best_i = i
            cc = c.scratch[best_i] + c.t_dur[a]
            total += cc
            c.scratch[best_i] = cc
    return total


cdef int _bounds_ok(ScCtx *c, i64 total):
    cdef int o, a
    cdef char *has = <char *> calloc(c.k, sizeof(char))
    for a in range(c.ntypes):
        if c.cnt[a]:
            has[c.t_org[a]] = 1
    try:
        for o in range(c.k):
            if has[o] and c.sum_o[o] + _spt_bound(c, o) > c.limits[o]:
                return 0
    finally:
        free(has)
    return 1 if total + _spt_bound(c, -1) < c.best else 0


cdef void _sc_rec(ScCtx *c, i64 total, i64 last_z, int last_a):
    cdef int i, a, o, mc, min_a
    cdef i64 z, cc
    if c.remaining == 0:
        if total < c.best:
            c.best = total
            for i in range(c.depth):
                c.best_mc[i] = c.path_mc[i]
                c.best_a[i] = c.path_a[i]
            c.best_len = c.depth
            c.have_path = 1
            if c.first:
                c.stop = 1
        return
    mc = -1
    for i in range(c.m):
        if c.is_open[i] and (mc < 0 or c.load[i] < c.load[mc]):
            mc = i
    z = c.load[mc]
    min_a = last_a if (c.pruning and z == last_z) else 0
    for a in range(min_a, c.ntypes + 1):
        if a < c.ntypes:
            if c.cnt[a] == 0:
                continue
            o = c.t_org[a]
            cc = z + c.t_dur[a]
            if c.sum_o[o] + cc > c.limits[o]:
                continue
            if c.pruning and total + cc >= c.best:
                continue
        elif c.nopen <= 1:
            continue
        c.nodes += 1
        if c.nodes > c.budget:
            c.status = OUT_OF_BUDGET
            c.stop = 1
            return
        c.path_mc[c.depth] = mc
        c.path_a[c.depth] = a
        c.depth += 1
        if a < c.ntypes:
            c.cnt[a] -= 1
            c.load[mc] = cc
            c.sum_o[o] += cc
            c.remaining -= 1
            if not c.pruning or _bounds_ok(c, total + cc):
                _sc_rec(c, total + cc, z, a)
            c.remaining += 1
            c.sum_o[o] -= cc
            c.load[mc] = z
            c.cnt[a] += 1
        else:
            c.is_open[mc] = 0
            c.nopen -= 1
            _sc_rec(c, total, z, a)
            c.nopen += 1
            c.is_open[mc] = 1
        c.depth -= 1
        if c.stop:
            return


def sumc_search(int m, t_org, t_dur, t_cnt, limits, best, budget, pruning, first):
    cdef ScCtx c
    cdef int ntypes = len(t_dur)
    cdef int k = len(limits)
    cdef int a, i
    cdef int steps = sum(t_cnt) + m + 1
    c.m = m
    c.ntypes = ntypes
    c.k = k
    c.t_org = <int *> malloc((ntypes + 1) * sizeof(int))
    c.t_dur = <i64 *> malloc((ntypes + 1) * sizeof(i64))
    c.cnt = <int *> malloc((ntypes + 1) * sizeof(int))
    c.limits = <i64 *> malloc((k + 1) * sizeof(i64))
    c.load = <i64 *> calloc(m, sizeof(i64))
    c.is_open = <char *> malloc(m * sizeof(char))
    c.sum_o = <i64 *> calloc(k + 1, sizeof(i64))
    c.scratch = <i64 *> calloc(m, sizeof(i64))
    c.path_mc = <int *> calloc(steps, sizeof(int))
    c.path_a = <int *> calloc(steps, sizeof(int))
    c.best_mc = <int *> calloc(steps, sizeof(int))
    c.best_a = <int *> calloc(steps, sizeof(int))
    try:
        c.remaining = 0
        for a in range(ntypes):
            c.t_org[a] = t_org[a]
            c.t_dur[a] = t_dur[a]
            c.cnt[a] = t_cnt[a]
            c.remaining += t_cnt[a]
        for i in range(k):
            c.limits[i] = limits[i]
        for i in range(m):
            c.is_open[i] = 1
        c.nopen = m
        c.depth = 0
        c.best_len = 0
        c.have_path = 0
        c.best = best
        c.nodes = 0
        c.budget = budget
        c.pruning = 1 if pruning else 0
        c.first = 1 if first else 0
        c.status = DONE
        c.stop = 0
        _sc_rec(&c, 0, -1, 0)
        path = None
        if c.have_path:
            path = [(c.best_mc[i], c.best_a[i]) for i in range(c.best_len)]
        return c.status, c.best, path, c.nodes
    finally:
        free(c.t_org); free(c.t_dur); free(c.cnt); free(c.limits); free(c.load)
        free(c.is_open); free(c.sum_o); free(c.scratch)
        free(c.path_mc); free(c.path_a); free(c.best_mc); free(c.best_a)
