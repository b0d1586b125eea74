"""Instances, schedules, objectives and individual rationality.

Indices follow the usual notation of the scheduling literature: organizations,
jobs and machines are numbered from 1.  Machines are numbered globally in
organization order, so organization 1 owns machines ``1..m_1``, organization 2
owns the next ``m_2`` machines, and so on.  Machine ownership never restricts
where a job may run in a shared schedule; it only matters for local schedules.
"""

from __future__ import annotations

import enum
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, NamedTuple

from .errors import InfeasibleScheduleError, MalformedScheduleError, ValidationError

#: Total processing time must fit a signed 64-bit word.
MAX_TOTAL_WORK = 2**63 - 1


class ObjectiveKind(enum.Enum):
    MAKESPAN = "makespan"
    SUM_COMPLETION = "sumc"

    @classmethod
    def parse(cls, text: str | "ObjectiveKind") -> "ObjectiveKind":
        if isinstance(text, cls):
            return text
        aliases = {"makespan": cls.MAKESPAN, "cmax": cls.MAKESPAN,
                   "sumc": cls.SUM_COMPLETION, "sum": cls.SUM_COMPLETION,
                   "sum_completion": cls.SUM_COMPLETION}
        try:
            return aliases[text.lower()]
        except KeyError:
            raise ValueError(f"unknown objective {text!r}") from None


MAKESPAN = ObjectiveKind.MAKESPAN
SUM_COMPLETION = ObjectiveKind.SUM_COMPLETION


class JobRef(NamedTuple):
    org: int
    job: int


class Placement(NamedTuple):
    machine: int
    completion: int


@dataclass(frozen=True)
class Organization:
    machines: int
    jobs: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "jobs", tuple(int(p) for p in self.jobs))


@dataclass(frozen=True)
class Instance:
    """A multi-organizational scheduling instance."""

    organizations: tuple[Organization, ...]

    def __post_init__(self) -> None:
        orgs = tuple(
            o if isinstance(o, Organization) else Organization(o[0], tuple(o[1]))
            for o in self.organizations
        )
        object.__setattr__(self, "organizations", orgs)
        if not orgs:
            raise ValidationError("an instance needs at least one organization")
        total = 0
        for i, org in enumerate(orgs, start=1):
            if not isinstance(org.machines, int) or org.machines < 1:
                raise ValidationError(
                    f"organization {i}: machine count must be a positive integer, got {org.machines!r}")
            for j, p in enumerate(org.jobs, start=1):
                if p < 1:
                    raise ValidationError(
                        f"organization {i}: job {j} has non-positive duration {p}")
            total += sum(org.jobs)
        if total > MAX_TOTAL_WORK:
            raise ValidationError("total processing time does not fit in 64 bits")

    @classmethod
    def from_lists(cls, spec: Iterable[tuple[int, Iterable[int]]]) -> "Instance":
        """Build an instance from ``[(machines, [durations...]), ...]``."""
        return cls(tuple(Organization(m, tuple(jobs)) for m, jobs in spec))

    @property
    def k(self) -> int:
        return len(self.organizations)

    @property
    def m(self) -> int:
        return sum(o.machines for o in self.organizations)

    @property
    def n(self) -> int:
        return sum(len(o.jobs) for o in self.organizations)

    @property
    def pmax(self) -> int:
        return max((p for o in self.organizations for p in o.jobs), default=0)

    @property
    def nmax(self) -> int:
        return max(len(o.jobs) for o in self.organizations)

    @property
    def mmax(self) -> int:
        return max(o.machines for o in self.organizations)

    @property
    def total_work(self) -> int:
        return sum(sum(o.jobs) for o in self.organizations)

    def job_refs(self, org: int | None = None) -> list[JobRef]:
        orgs = range(1, self.k + 1) if org is None else (org,)
        return [JobRef(i, j) for i in orgs
                for j in range(1, len(self.organizations[i - 1].jobs) + 1)]

    def duration(self, ref: JobRef) -> int:
        i, j = ref
        if not (1 <= i <= self.k and 1 <= j <= len(self.organizations[i - 1].jobs)):
            raise MalformedScheduleError(f"unknown job {tuple(ref)}")
        return self.organizations[i - 1].jobs[j - 1]

    def machine_range(self, org: int) -> range:
        """Global indices of the machines owned by ``org``."""
        first = 1 + sum(o.machines for o in self.organizations[: org - 1])
        return range(first, first + self.organizations[org - 1].machines)


@dataclass(frozen=True)
class Schedule:
    """Machine and completion time for every job.

    Stored as a sorted tuple of ``(JobRef, Placement)`` pairs so that schedules
    are hashable and compare by value.
    """

    entries: tuple[tuple[JobRef, Placement], ...] = ()

    def __post_init__(self) -> None:
        items = sorted((JobRef(*r), Placement(*p)) for r, p in self.entries)
        for a, b in zip(items, items[1:]):
            if a[0] == b[0]:
                raise MalformedScheduleError(f"job {tuple(a[0])} placed twice")
        object.__setattr__(self, "entries", tuple(items))
        object.__setattr__(self, "_index", dict(items))

    @classmethod
    def from_mapping(cls, mapping: Mapping[JobRef, Placement]) -> "Schedule":
        return cls(tuple(mapping.items()))

    @classmethod
    def from_sequences(cls, instance: Instance,
                       sequences: Mapping[int, Iterable[JobRef]]) -> "Schedule":
        """Left-justified schedule from per-machine job sequences."""
        entries = []
        for machine, seq in sequences.items():
            t = 0
            for ref in seq:
                t += instance.duration(ref)
                entries.append((JobRef(*ref), Placement(machine, t)))
        return cls(tuple(entries))

    def as_dict(self) -> dict[JobRef, Placement]:
        return dict(self._index)

    def __getitem__(self, ref: JobRef) -> Placement:
        return self._index[JobRef(*ref)]

    def __iter__(self) -> Iterator[JobRef]:
        return (r for r, _ in self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def items(self):
        return iter(self.entries)

    def machine_sequences(self, instance: Instance | None = None) -> dict[int, list[JobRef]]:
        """Jobs of every used machine, ordered by completion time."""
        seqs: dict[int, list[tuple[int, JobRef]]] = defaultdict(list)
        for ref, (machine, completion) in self.entries:
            seqs[machine].append((completion, ref))
        return {mc: [r for _, r in sorted(v)] for mc, v in sorted(seqs.items())}


@dataclass(frozen=True)
class LocalOptima:
    """Optimal local makespan and local sum of completion times per organization."""

    makespans: tuple[int, ...]
    sumcs: tuple[int, ...]

    def limit(self, org: int, kind: ObjectiveKind) -> int:
        seq = self.makespans if kind is MAKESPAN else self.sumcs
        return seq[org - 1]


@dataclass(frozen=True)
class Phase:
    deadline: int
    orgs: frozenset[int]


@dataclass(frozen=True)
class PhasePartition:
    """Organizations grouped by equal optimal local makespan.

    Phases are numbered from 1 in order of strictly increasing deadline.
    """

    phases: tuple[Phase, ...]
    org_phase: tuple[int, ...] = field(default=())

    def __post_init__(self) -> None:
        if not self.org_phase:
            n_orgs = sum(len(p.orgs) for p in self.phases)
            index = [0] * n_orgs
            for b, phase in enumerate(self.phases, start=1):
                for i in phase.orgs:
                    index[i - 1] = b
            object.__setattr__(self, "org_phase", tuple(index))

    @property
    def count(self) -> int:
        return len(self.phases)

    def phase_of(self, ref: JobRef) -> int:
        return self.org_phase[ref[0] - 1]

    def deadline(self, b: int) -> int:
        return self.phases[b - 1].deadline


@dataclass(frozen=True)
class OptResult:
    value: int
    schedule: Schedule
    proven_optimal: bool = True
    stats: Mapping[str, int] = field(default_factory=dict, compare=False)


def _validated_placements(instance: Instance, schedule: Schedule) -> dict[JobRef, Placement]:
    placed = schedule.as_dict()
    m = instance.m
    expected = set(instance.job_refs())
    extra = set(placed) - expected
    if extra:
        raise MalformedScheduleError(f"schedule names unknown jobs {sorted(map(tuple, extra))}")
    missing = expected - set(placed)
    if missing:
        raise MalformedScheduleError(f"schedule is missing jobs {sorted(map(tuple, missing))}")
    for ref, (machine, completion) in placed.items():
        if not 1 <= machine <= m:
            raise MalformedScheduleError(f"job {tuple(ref)} on machine {machine}, outside 1..{m}")
        if completion < 0:
            raise MalformedScheduleError(f"job {tuple(ref)} has negative completion {completion}")
    return placed


def check_feasible(instance: Instance, schedule: Schedule) -> bool:
    """True iff every job completes after its duration and no two jobs overlap.

    Two jobs on one machine are compatible when one starts no earlier than the
    other completes; back-to-back jobs are allowed.
    """
    placed = _validated_placements(instance, schedule)
    by_machine: dict[int, list[tuple[int, int]]] = defaultdict(list)
    for ref, (machine, completion) in placed.items():
        p = instance.duration(ref)
        if completion < p:
            return False
        by_machine[machine].append((completion - p, completion))
    for intervals in by_machine.values():
        intervals.sort(key=lambda iv: (iv[1], iv[0]))
        for (_, prev_end), (start, _) in zip(intervals, intervals[1:]):
            if start < prev_end:
                return False
    return True


def objective_value(schedule: Schedule, jobs: Iterable[JobRef] | None,
                    kind: ObjectiveKind) -> int:
    """Makespan or sum of completion times over ``jobs`` (all jobs if None)."""
    placed = schedule.as_dict()
    if jobs is None:
        completions = [c for _, c in placed.values()]
    else:
        try:
            completions = [placed[JobRef(*r)].completion for r in jobs]
        except KeyError as exc:
            raise MalformedScheduleError(f"job {tuple(exc.args[0])} not in schedule") from None
    if kind is MAKESPAN:
        return max(completions, default=0)
    return sum(completions)


def org_values(instance: Instance, schedule: Schedule, kind: ObjectiveKind) -> list[int]:
    return [objective_value(schedule, instance.job_refs(i), kind)
            for i in range(1, instance.k + 1)]


def is_individually_rational(instance: Instance, schedule: Schedule,
                             kind: ObjectiveKind, local: LocalOptima) -> bool:
    values = org_values(instance, schedule, kind)
    return all(v <= local.limit(i, kind) for i, v in enumerate(values, start=1))


def compute_phases(instance: Instance, local: LocalOptima) -> PhasePartition:
    groups: dict[int, set[int]] = defaultdict(set)
    for i, L in enumerate(local.makespans[: instance.k], start=1):
        groups[L].add(i)
    return PhasePartition(tuple(Phase(L, frozenset(orgs)) for L, orgs in sorted(groups.items())))


def left_justify(instance: Instance, schedule: Schedule) -> Schedule:
    """Remove idle time: each job starts when its machine predecessor completes."""
    _validated_placements(instance, schedule)
    return Schedule.from_sequences(instance, schedule.machine_sequences())


def well_order(instance: Instance, schedule: Schedule, phases: PhasePartition) -> Schedule:
    """Reorder every machine so jobs appear in non-decreasing phase order.

    Consecutive out-of-order pairs are exchanged until none remain.  An exchange
    moves the earlier-phase job to the start of the pair's time span and the
    later-phase job to its end, so no other job moves and the makespan is kept.
    """
    if not check_feasible(instance, schedule):
        raise InfeasibleScheduleError("well_order needs a feasible schedule")
    out: list[tuple[JobRef, Placement]] = []
    for machine, seq in schedule.machine_sequences().items():
        # (start, end, ref) triples in processing order
        slots = []
        for ref in seq:
            c = schedule[ref].completion
            slots.append([c - instance.duration(ref), c, ref])
        changed = True
        while changed:
            changed = False
            for x in range(len(slots) - 1):
                a, b = slots[x], slots[x + 1]
                if phases.phase_of(a[2]) > phases.phase_of(b[2]):
                    span_start, span_end = a[0], b[1]
                    pa, pb = instance.duration(a[2]), instance.duration(b[2])
                    slots[x] = [span_start, span_start + pb, b[2]]
                    slots[x + 1] = [span_end - pa, span_end, a[2]]
                    changed = True
        out.extend((ref, Placement(machine, end)) for _, end, ref in slots)
    return Schedule(tuple(out))
