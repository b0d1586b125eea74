"""Command line: solve, verify, generate, bench.

Exit codes: 0 success or "yes", 1 "no" or failed verification, 2 usage or
input error, 3 a solver ran out of nodes or states.
"""

from __future__ import annotations

import argparse
import csv
import io as _io
import json
import multiprocessing
import random
import sys
import time
from concurrent.futures import ProcessPoolExecutor, ThreadPoolExecutor
from pathlib import Path

from . import dp, gadgets, ilp, oracle
from .core import (
    MAKESPAN,
    Instance,
    ObjectiveKind,
    Organization,
    check_feasible,
    objective_value,
    org_values,
)
from .errors import (
    BudgetExceededError,
    MalformedScheduleError,
    ResourceLimitError,
    ValidationError,
)
from .io import (
    instance_to_dict,
    parse_instance,
    parse_schedule,
    schedule_to_list,
    write_instance,
)
from .local import compute_local_optima

EXIT_OK, EXIT_NO, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3
ALGORITHMS = ("auto", "bruteforce", "dp", "ilp")
SUMC_DP_STATE_LIMIT = 10**7
BENCH_HEADER = ["instance", "algorithm", "objective", "value", "proven_optimal",
                "wall_time_s", "work", "status"]


class UsageError(Exception):
    pass


def choose_algorithm(instance: Instance, kind: ObjectiveKind) -> str:
    if kind is MAKESPAN:
        return "ilp" if instance.m > 3 else "dp"
    if dp.estimate_sumc_states(instance) <= SUMC_DP_STATE_LIMIT:
        return "dp"
    return "bruteforce"


def run_solver(instance: Instance, kind: ObjectiveKind, algorithm: str,
               budget: int | None = None):
    """Returns (OptResult, algorithm actually used)."""
    if algorithm == "auto":
        algorithm = choose_algorithm(instance, kind)
    local = compute_local_optima(instance)
    if algorithm == "bruteforce":
        return oracle.solve_exact(instance, kind, local, budget), algorithm
    if algorithm == "dp":
        fn = dp.dp_makespan if kind is MAKESPAN else dp.dp_sumc
        return fn(instance, local), algorithm
    if algorithm == "ilp":
        if kind is not MAKESPAN:
            raise UsageError("the ilp algorithm only handles the makespan objective")
        return ilp.fpt_makespan(instance, local), algorithm
    raise UsageError(f"unknown algorithm {algorithm!r}")


def _resource_exit(exc: ResourceLimitError) -> int:
    payload = {"error": exc.reason, "message": str(exc)}
    if isinstance(exc, BudgetExceededError):
        payload["nodes"] = exc.nodes
        if exc.incumbent is not None:
            payload["incumbent_value"] = exc.incumbent.value
    print(json.dumps(payload), file=sys.stderr)
    return EXIT_RESOURCE


def cmd_solve(args) -> int:
    instance = parse_instance(args.instance)
    kind = ObjectiveKind.parse(args.objective)
    if args.algorithm == "ilp" and kind is not MAKESPAN:
        raise UsageError("the ilp algorithm only handles the makespan objective")
    if args.target is not None:
        if args.target < 0:
            raise UsageError("--target must be non-negative")
        algorithm = args.algorithm
        if algorithm in ("auto", "bruteforce"):
            answer = oracle.decide(instance, kind, None, args.target, args.budget)
        else:
            result, _ = run_solver(instance, kind, algorithm, args.budget)
            answer = result.value <= args.target
        print("yes" if answer else "no")
        return EXIT_OK if answer else EXIT_NO
    result, used = run_solver(instance, kind, args.algorithm, args.budget)
    payload = {"objective": kind.value, "algorithm": used, "value": result.value,
               "proven_optimal": result.proven_optimal,
               "schedule": schedule_to_list(result.schedule)}
    text = json.dumps(payload, indent=1) + "\n"
    if args.output:
        Path(args.output).write_text(text)
        print(result.value)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def verify_report(instance: Instance, schedule, kind: ObjectiveKind) -> tuple[bool, str]:
    local = compute_local_optima(instance)
    lines = []
    feasible = check_feasible(instance, schedule)
    lines.append(f"feasible: {'yes' if feasible else 'no'}")
    values = org_values(instance, schedule, kind)
    rational = True
    for i, val in enumerate(values, start=1):
        lim = local.limit(i, kind)
        ok = val <= lim
        rational &= ok
        lines.append(f"org {i}: {kind.value} {val} vs local {lim} {'ok' if ok else 'VIOLATED'}")
    lines.append(f"individually rational: {'yes' if rational else 'no'}")
    lines.append(f"value: {objective_value(schedule, None, kind)}")
    return feasible and rational, "\n".join(lines)


def cmd_verify(args) -> int:
    instance = parse_instance(args.instance)
    kind = ObjectiveKind.parse(args.objective)
    try:
        schedule = parse_schedule(args.schedule)
        ok, report = verify_report(instance, schedule, kind)
    except MalformedScheduleError as exc:
        print(f"malformed schedule: {exc}")
        return EXIT_NO
    print(report)
    return EXIT_OK if ok else EXIT_NO


def _range(text: str) -> tuple[int, int]:
    lo, _, hi = text.partition(":")
    lo_i, hi_i = int(lo), int(hi or lo)
    if lo_i > hi_i:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return lo_i, hi_i


def _tp(text: str) -> gadgets.ThreePartitionInstance:
    """``B:x1,x2,...``"""
    try:
        b, _, ints = text.partition(":")
        return gadgets.ThreePartitionInstance(int(b), tuple(int(x) for x in ints.split(",")))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad 3-Partition instance {text!r}: {exc}")


def random_instance(rng: random.Random, k: tuple[int, int], machines: tuple[int, int],
                    jobs: tuple[int, int], pmax: int) -> Instance:
    orgs = []
    for _ in range(rng.randint(*k)):
        m = rng.randint(*machines)
        orgs.append(Organization(m, tuple(rng.randint(1, pmax)
                                          for _ in range(rng.randint(*jobs)))))
    return Instance(tuple(orgs))


def cmd_generate(args) -> int:
    cert = None
    if args.kind == "random":
        rng = random.Random(args.seed)
        instance = random_instance(rng, args.orgs, args.machines, args.jobs, args.pmax)
    else:
        if args.kind == "sumc-np":
            out = gadgets.gen_sumc_hardness(_need(args.tp, "--tp"))
        elif args.kind == "dp-hard":
            out = gadgets.gen_dp_hardness(_need(args.tp, "--tp"), _need(args.tp2, "--tp2"))
        elif args.kind == "binpack":
            if not args.integers:
                raise UsageError("binpack needs --integers")
            bp = gadgets.BinPackingInstance(
                tuple(int(x) for x in args.integers.split(",")), args.capacity, args.bins)
            out = gadgets.gen_binpacking_hardness(bp)
        else:
            set_a = args.set_a or [gadgets.canonical_yes(1)] * args.v
            set_b = args.set_b or [gadgets.canonical_no(2)] * args.v
            out = gadgets.gen_theta2p(set_a, set_b)
        instance, cert = out.instance, dict(out.certificate, target=out.target)
    text = json.dumps(instance_to_dict(instance), indent=1) + "\n"
    if args.output:
        write_instance(instance, args.output)
        if cert is not None:
            cert_path = args.certificate or f"{args.output}.cert.json"
            Path(cert_path).write_text(json.dumps(cert, indent=1) + "\n")
    else:
        sys.stdout.write(text)
        if cert is not None and args.certificate:
            Path(args.certificate).write_text(json.dumps(cert, indent=1) + "\n")
    return EXIT_OK


def _need(value, flag):
    if value is None:
        raise UsageError(f"this generator needs {flag}")
    return value


def _bench_one(task):
    path, algorithm, objective, budget = task
    kind = ObjectiveKind.parse(objective)
    row = {"instance": path, "algorithm": algorithm, "objective": kind.value,
           "value": "", "proven_optimal": "false", "wall_time_s": "", "work": "",
           "status": "ok"}
    start = time.perf_counter()
    try:
        instance = parse_instance(path)
        result, _ = run_solver(instance, kind, algorithm, budget)
        row["value"] = result.value
        row["proven_optimal"] = str(result.proven_optimal).lower()
        row["work"] = next(iter(result.stats.values()), "")
    except BudgetExceededError as exc:
        row["status"] = exc.reason
        row["work"] = exc.nodes
        if exc.incumbent is not None:
            row["value"] = exc.incumbent.value
    except ResourceLimitError as exc:
        row["status"] = exc.reason
    except UsageError:
        row["status"] = "unsupported"
    except (ValidationError, OSError) as exc:
        row["status"] = f"error: {exc}".replace("\n", " ")
    row["wall_time_s"] = f"{time.perf_counter() - start:.6f}"
    return row


def _bench_child(task, conn):
    conn.send(_bench_one(task))
    conn.close()


def _bench_limited(task, time_limit):
    """Run one task in a child process, killing it after ``time_limit`` seconds."""
    ctx = multiprocessing.get_context("spawn")
    recv, send = ctx.Pipe(duplex=False)
    proc = ctx.Process(target=_bench_child, args=(task, send))
    start = time.perf_counter()
    proc.start()
    row = recv.recv() if recv.poll(time_limit) else None
    proc.join(1)
    if proc.is_alive():
        proc.terminate()
        proc.join()
    if row is None:
        path, algorithm, objective, _ = task
        row = {"instance": path, "algorithm": algorithm,
               "objective": ObjectiveKind.parse(objective).value, "value": "",
               "proven_optimal": "false", "work": "", "status": "timeout",
               "wall_time_s": f"{time.perf_counter() - start:.6f}"}
    return row


def bench(directory, algorithms, objective, budget=None, workers=1,
          time_limit=None) -> str:
    """CSV report, one row per (instance, algorithm), ordered by path."""
    files = sorted(str(p) for p in Path(directory).glob("*.json")
                   if not p.name.endswith(".cert.json"))
    tasks = [(f, a, objective, budget) for f in files for a in algorithms]
    if time_limit is not None:
        with ThreadPoolExecutor(max(1, workers)) as pool:
            rows = list(pool.map(lambda t: _bench_limited(t, time_limit), tasks))
    elif workers > 1 and len(tasks) > 1:
        ctx = multiprocessing.get_context("spawn")
        with ProcessPoolExecutor(workers, mp_context=ctx) as pool:
            rows = list(pool.map(_bench_one, tasks))
    else:
        rows = [_bench_one(t) for t in tasks]
    rows.sort(key=lambda r: (r["instance"], algorithms.index(r["algorithm"])))
    buf = _io.StringIO()
    writer = csv.DictWriter(buf, BENCH_HEADER, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    buf.write("# consistency\n")
    mismatches = 0
    by_inst: dict[str, dict[str, object]] = {}
    for r in rows:
        if r["status"] == "ok" and r["proven_optimal"] == "true":
            by_inst.setdefault(r["instance"], {})[r["algorithm"]] = r["value"]
    for inst, vals in by_inst.items():
        if len(set(vals.values())) > 1:
            mismatches += 1
            detail = ";".join(f"{a}={v}" for a, v in vals.items())
            buf.write(f"# mismatch,{inst},{detail}\n")
    buf.write(f"# mismatches,{mismatches}\n")
    return buf.getvalue()


def cmd_bench(args) -> int:
    algorithms = [a.strip() for a in args.algorithms.split(",") if a.strip()]
    for a in algorithms:
        if a not in ALGORITHMS:
            raise UsageError(f"unknown algorithm {a!r}")
    if not Path(args.directory).is_dir():
        raise UsageError(f"{args.directory} is not a directory")
    report = bench(args.directory, algorithms, args.objective, args.budget, args.workers,
                   args.time_limit)
    if args.output:
        Path(args.output).write_text(report)
    else:
        sys.stdout.write(report)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mosched",
                                description="Individually rational multi-organization scheduling")
    sub = p.add_subparsers(dest="command", required=True)
    objective = dict(choices=["makespan", "sumc"], default="makespan")
    budget = dict(type=int, default=None,
                  help="branch-and-bound node budget (default: $MOSCHED_NODE_BUDGET or 1e8)")

    s = sub.add_parser("solve", help="optimize, or decide with --target")
    s.add_argument("instance")
    s.add_argument("--objective", **objective)
    s.add_argument("--algorithm", choices=ALGORITHMS, default="auto")
    s.add_argument("--target", type=int)
    s.add_argument("--output", "-o")
    s.add_argument("--budget", **budget)
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify", help="check feasibility and individual rationality")
    v.add_argument("instance")
    v.add_argument("schedule")
    v.add_argument("--objective", **objective)
    v.set_defaults(func=cmd_verify)

    g = sub.add_parser("generate", help="write a random or reduction instance")
    g.add_argument("kind", choices=["random", "sumc-np", "dp-hard", "binpack", "theta2p"])
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--output", "-o")
    g.add_argument("--certificate")
    g.add_argument("--orgs", type=_range, default=(1, 3), metavar="LO:HI")
    g.add_argument("--machines", type=_range, default=(1, 2), metavar="LO:HI")
    g.add_argument("--jobs", type=_range, default=(0, 4), metavar="LO:HI")
    g.add_argument("--pmax", type=int, default=5)
    g.add_argument("--tp", type=_tp, metavar="B:x1,x2,...")
    g.add_argument("--tp2", type=_tp, metavar="B:x1,x2,...")
    g.add_argument("--integers", metavar="x1,x2,...")
    g.add_argument("--capacity", type=int, default=1)
    g.add_argument("--bins", type=int, default=1)
    g.add_argument("--set-a", type=_tp, action="append", metavar="B:x1,...")
    g.add_argument("--set-b", type=_tp, action="append", metavar="B:x1,...")
    g.add_argument("--v", type=int, default=1, help="theta2p size when no sets are given")
    g.set_defaults(func=cmd_generate)

    b = sub.add_parser("bench", help="run solvers over a directory of instances")
    b.add_argument("directory")
    b.add_argument("--algorithms", default="bruteforce,dp,ilp")
    b.add_argument("--objective", **objective)
    b.add_argument("--budget", **budget)
    b.add_argument("--workers", type=int, default=1)
    b.add_argument("--time-limit", type=float, default=None,
                   help="seconds per solver run; overdue runs are killed and marked timeout")
    b.add_argument("--output", "-o")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceLimitError as exc:
        return _resource_exit(exc)
    except (ValidationError, MalformedScheduleError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
