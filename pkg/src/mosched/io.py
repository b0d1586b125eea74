"""JSON files for instances and schedules.

Instance: ``{"organizations": [{"machines": 2, "jobs": [3, 3, 3]}, ...]}``.
Schedule: a list of ``{"org", "job", "machine", "completion"}`` records, or an
object with such a list under ``"schedule"`` (the solver's output format).
All indices are 1-based.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from .core import Instance, JobRef, Organization, Placement, Schedule
from .errors import MalformedScheduleError, ValidationError


def _load(path) -> Any:
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def _int(value, where: str, minimum: int) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValidationError(f"{where}: expected an integer, got {value!r}")
    if value < minimum:
        raise ValidationError(f"{where}: must be >= {minimum}, got {value}")
    return value


def instance_from_dict(data: Any, source: str = "instance") -> Instance:
    if not isinstance(data, dict) or "organizations" not in data:
        raise ValidationError(f"{source}: expected an object with key 'organizations'")
    orgs = data["organizations"]
    if not isinstance(orgs, list):
        raise ValidationError(f"{source}: 'organizations' must be a list")
    if not orgs:
        raise ValidationError(f"{source}: 'organizations' is empty")
    out = []
    for i, org in enumerate(orgs, start=1):
        where = f"{source}: organization {i}"
        if not isinstance(org, dict):
            raise ValidationError(f"{where}: expected an object")
        machines = _int(org.get("machines"), f"{where}: 'machines'", 1)
        jobs = org.get("jobs", [])
        if not isinstance(jobs, list):
            raise ValidationError(f"{where}: 'jobs' must be a list")
        durations = tuple(_int(p, f"{where}: job {j}", 1) for j, p in enumerate(jobs, start=1))
        out.append(Organization(machines, durations))
    return Instance(tuple(out))


def instance_to_dict(instance: Instance) -> dict:
    return {"organizations": [{"machines": o.machines, "jobs": list(o.jobs)}
                              for o in instance.organizations]}


def parse_instance(path) -> Instance:
    return instance_from_dict(_load(path), str(path))


def write_instance(instance: Instance, path) -> None:
    Path(path).write_text(json.dumps(instance_to_dict(instance), indent=1) + "\n")


def schedule_to_list(schedule: Schedule) -> list[dict]:
    return [{"org": r.org, "job": r.job, "machine": p.machine, "completion": p.completion}
            for r, p in schedule.items()]


def schedule_from_list(records: Any, source: str = "schedule") -> Schedule:
    if isinstance(records, dict) and "schedule" in records:
        records = records["schedule"]
    if not isinstance(records, list):
        raise MalformedScheduleError(f"{source}: expected a list of placements")
    entries = []
    for n, rec in enumerate(records, start=1):
        if not isinstance(rec, dict):
            raise MalformedScheduleError(f"{source}: entry {n} is not an object")
        try:
            vals = [rec[key] for key in ("org", "job", "machine", "completion")]
        except KeyError as exc:
            raise MalformedScheduleError(f"{source}: entry {n} lacks {exc.args[0]!r}") from None
        for v in vals:
            if isinstance(v, bool) or not isinstance(v, int):
                raise MalformedScheduleError(f"{source}: entry {n} has non-integer field {v!r}")
        entries.append((JobRef(vals[0], vals[1]), Placement(vals[2], vals[3])))
    return Schedule(tuple(entries))


def parse_schedule(path) -> Schedule:
    try:
        data = _load(path)
    except ValidationError as exc:
        raise MalformedScheduleError(str(exc)) from None
    return schedule_from_list(data, str(path))


def write_schedule(schedule: Schedule, path) -> None:
    Path(path).write_text(json.dumps(schedule_to_list(schedule), indent=1) + "\n")
