"""Configuration integer program for the makespan problem.

For a candidate makespan T the jobs are grouped into phases by the local
makespan of their organization; organizations whose local makespan is at
least T share one final phase with deadline T.  A variable counts the
machines that run one phase from ``start`` to ``end`` holding ``M[t-1]`` jobs
of each duration t.  Windows for ``start`` and ``end`` come from the
balancedness bound pmax^3 + pmax around the average phase end, and the
per-duration counts from the deviation bound around the per-machine average.
"""

from __future__ import annotations

import itertools
import math
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp
from scipy.sparse import coo_array

from .core import (
    MAKESPAN,
    Instance,
    JobRef,
    LocalOptima,
    OptResult,
    Phase,
    PhasePartition,
    Schedule,
    check_feasible,
    compute_phases,
)
from .errors import ResourceLimitError
from .local import compute_local_optima, local_union_schedule
from .oracle import makespan_lower_bound

MAX_INT64 = 2**63 - 1


@dataclass(frozen=True, order=True)
class PhaseConfig:
    phase: int
    start: int
    end: int
    M: tuple[int, ...]


@dataclass
class IntegerProgram:
    """Bounded integer variables with sparse linear constraints.

    Constraints are ``(coefficients, rhs)`` pairs where ``coefficients`` maps a
    variable index to its integer coefficient.
    """

    names: list = field(default_factory=list)
    lower: list[int] = field(default_factory=list)
    upper: list[int] = field(default_factory=list)
    equalities: list[tuple[dict[int, int], int]] = field(default_factory=list)
    inequalities: list[tuple[dict[int, int], int]] = field(default_factory=list)
    objective: dict[int, int] | None = None

    def add_variable(self, name, lo: int, hi: int) -> int:
        if hi < lo:
            raise ValueError(f"empty domain for {name!r}")
        self.names.append(name)
        self.lower.append(int(lo))
        self.upper.append(int(hi))
        return len(self.names) - 1

    def add_eq(self, coefs: Mapping[int, int], rhs: int) -> None:
        self._check(coefs)
        self.equalities.append((dict(coefs), int(rhs)))

    def add_le(self, coefs: Mapping[int, int], rhs: int) -> None:
        self._check(coefs)
        self.inequalities.append((dict(coefs), int(rhs)))

    def _check(self, coefs) -> None:
        for i in coefs:
            if not 0 <= i < len(self.names):
                raise ValueError(f"constraint references undeclared variable {i}")

    def satisfied_by(self, values: Sequence[int]) -> bool:
        if len(values) != len(self.names):
            return False
        for x, lo, hi in zip(values, self.lower, self.upper):
            if not lo <= x <= hi:
                return False
        for coefs, rhs in self.equalities:
            if sum(c * values[i] for i, c in coefs.items()) != rhs:
                return False
        for coefs, rhs in self.inequalities:
            if sum(c * values[i] for i, c in coefs.items()) > rhs:
                return False
        return True


def deviation_bound(pmax: int) -> int:
    """h(1) * g(pmax) with h(l) = (pmax+1)!/(l+1)! and g = 3 pmax^3 + 2 pmax."""
    if pmax < 1:
        raise ValueError("pmax must be positive")
    value = (math.factorial(pmax + 1) // 2) * (3 * pmax**3 + 2 * pmax)
    if value > MAX_INT64:
        raise OverflowError(f"deviation bound for pmax={pmax} exceeds 64 bits")
    return value


def phase_window(pmax: int) -> int:
    return pmax**3 + pmax


def decision_phases(instance: Instance, local: LocalOptima, T: int) -> PhasePartition:
    """Phases for target T: every organization with local makespan >= T joins
    one last phase whose deadline is T."""
    base = compute_phases(instance, local)
    kept = [ph for ph in base.phases if ph.deadline < T]
    merged = frozenset().union(*(ph.orgs for ph in base.phases if ph.deadline >= T))
    if merged:
        kept.append(Phase(T, merged))
    return PhasePartition(tuple(kept))


def _phase_jobs(instance: Instance, phases: PhasePartition):
    """Per phase: {duration: [refs]}."""
    pools = [defaultdict(list) for _ in range(phases.count)]
    for ref in instance.job_refs():
        pools[phases.phase_of(ref) - 1][instance.duration(ref)].append(ref)
    return pools


def _windows(instance: Instance, phases: PhasePartition, T: int):
    """Integer (lo, hi) window of phase ends, indexed 0..count (0 = time zero)."""
    m, C = instance.m, phase_window(instance.pmax)
    pools = _phase_jobs(instance, phases)
    prefix = Fraction(0)
    out = [(0, 0)]
    for b in range(1, phases.count + 1):
        prefix += Fraction(sum(p * len(r) for p, r in pools[b - 1].items()), m)
        lo = max(0, math.floor(prefix - C))
        hi = min(math.ceil(prefix + C), phases.deadline(b), T)
        out.append((lo, hi))
    return out


def enumerate_configs(instance: Instance, phases: PhasePartition, T: int,
                      f_override: int | None = None) -> list[PhaseConfig]:
    """All valid (phase, start, end, M) combinations for target T.

    An empty result for some phase means no schedule of makespan T exists in
    this form; see ``missing_phases``.
    """
    pmax = max(instance.pmax, 1)
    f = deviation_bound(pmax) if f_override is None else f_override
    m = instance.m
    pools = _phase_jobs(instance, phases)
    windows = _windows(instance, phases, T)
    configs = []
    for b in range(1, phases.count + 1):
        ranges = []
        for t in range(1, pmax + 1):
            avail = len(pools[b - 1].get(t, ()))
            base = avail // m
            ranges.append(range(max(0, base - f), min(avail, base + f) + 1))
        by_length: dict[int, list[tuple[int, ...]]] = defaultdict(list)
        for M in itertools.product(*ranges):
            by_length[sum(c * t for t, c in enumerate(M, start=1))].append(M)
        s_lo, s_hi = windows[b - 1] if b > 1 else (0, 0)
        e_lo, e_hi = windows[b]
        for start in range(s_lo, s_hi + 1):
            for end in range(max(start, e_lo), e_hi + 1):
                for M in by_length.get(end - start, ()):
                    configs.append(PhaseConfig(b, start, end, M))
    return configs


def missing_phases(phases: PhasePartition, configs: Sequence[PhaseConfig]) -> list[int]:
    have = {c.phase for c in configs}
    return [b for b in range(1, phases.count + 1) if b not in have]


def build_decision_program(instance: Instance, phases: PhasePartition,
                           configs: Sequence[PhaseConfig], T: int) -> IntegerProgram:
    """Feasibility program: machine count per phase, matching phase boundaries,
    and every job of every phase scheduled.  ``T`` is already reflected in the
    config windows and is kept for the record."""
    m = instance.m
    pmax = max(instance.pmax, 1)
    prog = IntegerProgram()
    for c in configs:
        prog.add_variable(c, 0, m)
    pools = _phase_jobs(instance, phases)
    by_phase = defaultdict(list)
    ends = defaultdict(lambda: defaultdict(list))
    starts = defaultdict(lambda: defaultdict(list))
    for i, c in enumerate(configs):
        by_phase[c.phase].append(i)
        ends[c.phase][c.end].append(i)
        starts[c.phase][c.start].append(i)
    for b in range(1, phases.count + 1):
        prog.add_eq({i: 1 for i in by_phase[b]}, m)
    for b in range(2, phases.count + 1):
        times = set(ends[b - 1]) | set(starts[b])
        for time in sorted(times):
            coefs = {i: 1 for i in ends[b - 1].get(time, ())}
            for i in starts[b].get(time, ()):
                coefs[i] = coefs.get(i, 0) - 1
            prog.add_eq(coefs, 0)
    for b in range(1, phases.count + 1):
        for t in range(1, pmax + 1):
            coefs = {i: configs[i].M[t - 1] for i in by_phase[b] if configs[i].M[t - 1]}
            prog.add_eq(coefs, len(pools[b - 1].get(t, ())))
    return prog


def _solve_highs(prog: IntegerProgram):
    n = len(prog.names)
    rows, cols, vals, lo, hi = [], [], [], [], []
    r = 0
    for coefs, rhs in prog.equalities:
        for i, c in coefs.items():
            rows.append(r); cols.append(i); vals.append(c)
        lo.append(rhs); hi.append(rhs)
        r += 1
    for coefs, rhs in prog.inequalities:
        for i, c in coefs.items():
            rows.append(r); cols.append(i); vals.append(c)
        lo.append(-np.inf); hi.append(rhs)
        r += 1
    c = np.zeros(n)
    if prog.objective:
        for i, w in prog.objective.items():
            c[i] = w
    constraints = []
    if r:
        A = coo_array((vals, (rows, cols)), shape=(r, n)).tocsr()
        constraints.append(LinearConstraint(A, lo, hi))
    res = milp(c, constraints=constraints, integrality=np.ones(n),
               bounds=Bounds(prog.lower, prog.upper))
    if res.status == 2:
        return None
    if res.status != 0:
        raise ResourceLimitError(f"integer program solver stopped: {res.message}")
    values = [int(round(x)) for x in res.x]
    if not prog.satisfied_by(values):
        return "unverified"
    return values


def _solve_backtrack(prog: IntegerProgram, node_cap: int):
    """Exact depth-first search over variable values with interval propagation."""
    n = len(prog.names)
    cons = [(coefs, rhs, True) for coefs, rhs in prog.equalities]
    cons += [(coefs, rhs, False) for coefs, rhs in prog.inequalities]
    touching = defaultdict(list)
    for k, (coefs, _, _) in enumerate(cons):
        for i in coefs:
            touching[i].append(k)
    # variables in order of first constraint use keeps partial sums tight early
    order = sorted(range(n), key=lambda i: (min(touching[i], default=len(cons)), i))
    # suffix reach of each constraint from position x onward
    smin = [[0] * (n + 1) for _ in cons]
    smax = [[0] * (n + 1) for _ in cons]
    for k, (coefs, _, _) in enumerate(cons):
        for x in range(n - 1, -1, -1):
            v = order[x]
            a = coefs.get(v, 0)
            lo_c, hi_c = sorted((a * prog.lower[v], a * prog.upper[v]))
            smin[k][x] = smin[k][x + 1] + lo_c
            smax[k][x] = smax[k][x + 1] + hi_c
    partial = [0] * len(cons)
    values = [0] * n
    nodes = 0

    def ok(k, x):
        coefs, rhs, is_eq = cons[k]
        low = partial[k] + smin[k][x]
        if low > rhs:
            return False
        return not is_eq or partial[k] + smax[k][x] >= rhs

    def rec(x):
        nonlocal nodes
        if x == n:
            return True
        v = order[x]
        for val in range(prog.lower[v], prog.upper[v] + 1):
            nodes += 1
            if nodes > node_cap:
                raise ResourceLimitError(f"backtracking exceeded {node_cap} nodes")
            for k in touching[v]:
                partial[k] += cons[k][0][v] * val
            values[v] = val
            if all(ok(k, x + 1) for k in touching[v]) and rec(x + 1):
                return True
            for k in touching[v]:
                partial[k] -= cons[k][0][v] * val
        return False

    if not all(ok(k, 0) for k in range(len(cons))):
        return None
    return list(values) if rec(0) else None


def solve_ip(program: IntegerProgram, method: str = "highs",
             node_cap: int = 10**7) -> list[int] | None:
    """Integer assignment satisfying ``program`` or None if none exists.

    ``highs`` runs the MILP solver and re-checks its rounded answer in exact
    integer arithmetic, falling back to the backtracking search if the check
    fails.  ``backtrack`` is a self-contained exact search.
    """
    if method == "highs":
        values = _solve_highs(program)
        if values != "unverified":
            return values
        method = "backtrack"
    if method == "backtrack":
        return _solve_backtrack(program, node_cap)
    raise ValueError(f"unknown method {method!r}")


def _decide_T(instance, local, T, f_override, method):
    phases = decision_phases(instance, local, T)
    full = deviation_bound(max(instance.pmax, 1))
    tries = [f_override] if f_override is not None and f_override < full else []
    tries.append(None)
    for f in tries:
        configs = enumerate_configs(instance, phases, T, f)
        if missing_phases(phases, configs):
            continue
        program = build_decision_program(instance, phases, configs, T)
        values = solve_ip(program, method)
        if values is not None:
            return phases, configs, values
    return None


def reconstruct(instance: Instance, phases: PhasePartition,
                configs: Sequence[PhaseConfig], values: Sequence[int]) -> Schedule:
    """Assign jobs phase by phase following a solved decision program."""
    pools = _phase_jobs(instance, phases)
    for pool in pools:
        for refs in pool.values():
            refs.sort()
    current = [0] * instance.m
    seqs: dict[int, list[JobRef]] = {z + 1: [] for z in range(instance.m)}
    chosen = sorted((c, v) for c, v in zip(configs, values) if v)
    for b in range(1, phases.count + 1):
        taken = [False] * instance.m
        for c, v in (cv for cv in chosen if cv[0].phase == b):
            for _ in range(v):
                z = next(z for z in range(instance.m)
                         if not taken[z] and current[z] == c.start)
                taken[z] = True
                for t in range(len(c.M), 0, -1):
                    for _ in range(c.M[t - 1]):
                        seqs[z + 1].append(pools[b - 1][t].pop(0))
                current[z] = c.end
    return Schedule.from_sequences(instance, seqs)


def encode_schedule(instance: Instance, schedule: Schedule,
                    phases: PhasePartition) -> dict[PhaseConfig, int]:
    """Variable assignment describing a left-justified well-ordered schedule."""
    pmax = max(instance.pmax, 1)
    counts: dict[PhaseConfig, int] = defaultdict(int)
    seqs = schedule.machine_sequences()
    for z in range(1, instance.m + 1):
        seq = seqs.get(z, [])
        t = 0
        for b in range(1, phases.count + 1):
            M = [0] * pmax
            start = t
            for ref in seq:
                if phases.phase_of(ref) == b:
                    p = instance.duration(ref)
                    M[p - 1] += 1
                    t = max(t, schedule[ref].completion)
            counts[PhaseConfig(b, start, t, tuple(M))] += 1
    return dict(counts)


def fpt_makespan(instance: Instance, local: LocalOptima | None = None,
                 f_override: int | None = None, method: str = "highs") -> OptResult:
    """Optimal individually rational makespan by binary search over T.

    Each probe solves the configuration program; the union of local optima
    certifies the upper end of the range.
    """
    local = local or compute_local_optima(instance)
    hi = max(local.makespans)
    lo = makespan_lower_bound(instance)
    best = None
    probes = 0
    while lo < hi:
        mid = (lo + hi) // 2
        probes += 1
        found = _decide_T(instance, local, mid, f_override, method)
        if found is None:
            lo = mid + 1
        else:
            hi = mid
            best = (mid, found)
    if best is not None and best[0] == lo:
        phases, configs, values = best[1]
        schedule = reconstruct(instance, phases, configs, values)
        if not check_feasible(instance, schedule):
            raise AssertionError("reconstructed schedule is infeasible")
    else:
        schedule = local_union_schedule(instance, MAKESPAN)
    return OptResult(lo, schedule, True, {"probes": probes})
