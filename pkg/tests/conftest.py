import random
import sys
from pathlib import Path

import pytest
from hypothesis import strategies as st

from mosched.core import Instance, JobRef, Placement, Schedule

sys.path.insert(0, str(Path(__file__).parent))

# Minimum IR sum of completion times of the running example, computed by the
# branch-and-bound oracle and confirmed by tests/naive.py's full enumeration.
EXAMPLE1_SUMC = 30


@pytest.fixture
def example1():
    return Instance.from_lists([(2, [3, 3, 3]), (1, [1] * 6)])


def example2_schedule():
    """Every machine runs two unit jobs and then one 3-job."""
    entries = []
    for d in range(3):
        entries.append((JobRef(2, 2 * d + 1), Placement(d + 1, 1)))
        entries.append((JobRef(2, 2 * d + 2), Placement(d + 1, 2)))
        entries.append((JobRef(1, d + 1), Placement(d + 1, 5)))
    return Schedule(tuple(entries))


def random_small_instance(rng, max_k=3, max_m=3, max_n=8, pmax=5):
    m = rng.randint(1, max_m)
    k = rng.randint(1, min(max_k, m))
    machines = [1] * k
    for _ in range(m - k):
        machines[rng.randrange(k)] += 1
    counts = [0] * k
    for _ in range(rng.randint(0, max_n)):
        counts[rng.randrange(k)] += 1
    return Instance.from_lists(
        [(machines[i], [rng.randint(1, pmax) for _ in range(counts[i])]) for i in range(k)])


def seeded_instances(count, seed, **kw):
    rng = random.Random(seed)
    return [random_small_instance(rng, **kw) for _ in range(count)]


@st.composite
def instances(draw, max_k=3, max_machines=2, max_jobs=3, pmax=5):
    k = draw(st.integers(1, max_k))
    orgs = []
    for _ in range(k):
        m = draw(st.integers(1, max_machines))
        jobs = draw(st.lists(st.integers(1, pmax), max_size=max_jobs))
        orgs.append((m, jobs))
    return Instance.from_lists(orgs)


ACCEPTANCE_LINES: list[str] = []


def record_acceptance(number, ok, detail, seconds):
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} ({seconds:.2f}s) {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
