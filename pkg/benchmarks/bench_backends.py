"""Compare the compiled and pure-Python branch-and-bound kernels.

    python benchmarks/bench_backends.py [--instances 40] [--seed 0]

Both kernels run the same search, so node counts must match exactly; the
script fails loudly if they do not.
"""

import argparse
import random
import time

from mosched import _backend
from mosched.cli import random_instance
from mosched.local import compute_local_optima
from mosched.oracle import solve_exact


def workload(n_instances, seed, n_range, max_m):
    rng = random.Random(seed)
    out = []
    while len(out) < n_instances:
        inst = random_instance(rng, (1, 4), (1, 2), (2, 6), 6)
        if n_range[0] <= inst.n <= n_range[1] and inst.m <= max_m:
            out.append(inst)
    return out


def run(backend, instances, kind, pruning):
    start = time.perf_counter()
    nodes, values = 0, []
    for inst in instances:
        local = compute_local_optima(inst)
        res = solve_exact(inst, kind, local, pruning=pruning, backend=backend)
        nodes += res.stats["nodes"]
        values.append(res.value)
    return time.perf_counter() - start, nodes, values


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--instances", type=int, default=40)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    backends = _backend.available()
    if "compiled" not in backends:
        print("compiled kernels not built; only the Python fallback is available")
    large = workload(args.instances, args.seed, (10, 16), 6)
    small = workload(args.instances, args.seed + 1, (5, 7), 3)
    print(f"{'objective':<10}{'pruning':<9}{'backend':<10}{'seconds':>10}{'nodes':>12}{'speedup':>9}")
    for kind, pruning, instances in (("makespan", True, large), ("sumc", True, large),
                                     ("makespan", False, small), ("sumc", False, small)):
        results = {b: run(b, instances, kind, pruning) for b in backends}
        ref = results["python"]
        for b, (secs, nodes, values) in results.items():
            if nodes != ref[1] or values != ref[2]:
                raise SystemExit(f"backend {b} disagrees with the Python kernel")
            print(f"{kind:<10}{str(pruning):<9}{b:<10}{secs:>10.3f}{nodes:>12}"
                  f"{ref[0] / secs:>8.1f}x")


if __name__ == "__main__":
    main()
