from collections import Counter
from fractions import Fraction

import pytest
from conftest import seeded_instances
from sympy import factorial

from mosched.core import (
    MAKESPAN,
    Instance,
    check_feasible,
    is_individually_rational,
    left_justify,
    objective_value,
    well_order,
)
from mosched.ilp import (
    IntegerProgram,
    PhaseConfig,
    _decide_T,
    build_decision_program,
    decision_phases,
    deviation_bound,
    encode_schedule,
    enumerate_configs,
    fpt_makespan,
    missing_phases,
    phase_window,
    reconstruct,
    solve_ip,
)
from mosched.local import compute_local_optima
from mosched.oracle import solve_exact

METHODS = ["highs", "backtrack"]


def closed_form(pmax):
    h1 = Fraction(int(factorial(pmax + 1)), int(factorial(2)))
    return int(h1 * (3 * pmax**3 + 2 * pmax))


@pytest.mark.parametrize("pmax,want", [(1, 5), (2, 84), (3, 1044)])
def test_deviation_bound(pmax, want):
    assert closed_form(pmax) == want
    assert deviation_bound(pmax) == want


def test_deviation_bound_errors():
    with pytest.raises(ValueError):
        deviation_bound(0)
    with pytest.raises(OverflowError):
        deviation_bound(40)


def test_phase_window():
    assert [phase_window(p) for p in (1, 2, 3)] == [2, 10, 30]


def test_forced_config():
    inst = Instance.from_lists([(3, [1, 1, 1])])
    phases = decision_phases(inst, compute_local_optima(inst), 1)
    configs = enumerate_configs(inst, phases, 1)
    # an idle machine is inside the windows too; the program rules it out
    assert configs == [PhaseConfig(1, 0, 0, (0,)), PhaseConfig(1, 0, 1, (1,))]
    assert solve_ip(build_decision_program(inst, phases, configs, 1)) == [0, 3]
    prog = build_decision_program(inst, phases, configs[1:], 1)
    assert len(prog.names) == 1
    assert solve_ip(prog) == [3]


def test_example1_configs(example1):
    local = compute_local_optima(example1)
    phases = decision_phases(example1, local, 5)
    assert phases.count == 1 and phases.deadline(1) == 5
    configs = enumerate_configs(example1, phases, 5)
    full = {c.M for c in configs if (c.start, c.end) == (0, 5)}
    assert full == {(2, 0, 1), (5, 0, 0)}
    assert all(sum(t * x for t, x in enumerate(c.M, 1)) == c.end - c.start for c in configs)


def test_empty_window():
    inst = Instance.from_lists([(1, [1] * 10)])
    phases = decision_phases(inst, compute_local_optima(inst), 5)
    configs = enumerate_configs(inst, phases, 5)
    assert configs == []
    assert missing_phases(phases, configs) == [1]


def test_phase_merging():
    inst = Instance.from_lists([(1, [2]), (1, [3, 3]), (1, [4, 4])])
    phases = decision_phases(inst, compute_local_optima(inst), 6)
    assert [phases.deadline(b) for b in range(1, phases.count + 1)] == [2, 6]
    assert phases.phases[1].orgs == {2, 3}


class TestSolveIP:
    @pytest.mark.parametrize("method", METHODS)
    def test_fixed(self, method):
        prog = IntegerProgram()
        x = prog.add_variable("x", 0, 3)
        prog.add_eq({x: 1}, 2)
        assert solve_ip(prog, method) == [2]

    @pytest.mark.parametrize("method", METHODS)
    def test_infeasible(self, method):
        prog = IntegerProgram()
        x = prog.add_variable("x", 0, 2)
        y = prog.add_variable("y", 0, 2)
        prog.add_eq({x: 1, y: 1}, 5)
        assert solve_ip(prog, method) is None

    @pytest.mark.parametrize("method", METHODS)
    def test_inequality(self, method):
        prog = IntegerProgram()
        x = prog.add_variable("x", 0, 5)
        y = prog.add_variable("y", 0, 5)
        prog.add_eq({x: 2, y: 3}, 12)
        prog.add_le({x: 1}, 2)
        vals = solve_ip(prog, method)
        assert vals == [0, 4]

    def test_backtrack_cap(self):
        from mosched.errors import ResourceLimitError
        prog = IntegerProgram()
        xs = [prog.add_variable(i, 0, 9) for i in range(6)]
        prog.add_eq({x: 2 for x in xs}, 61)
        with pytest.raises(ResourceLimitError):
            solve_ip(prog, "backtrack", node_cap=50)

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            solve_ip(IntegerProgram(), "simplex")

    def test_validation(self):
        prog = IntegerProgram()
        with pytest.raises(ValueError):
            prog.add_variable("x", 3, 1)
        with pytest.raises(ValueError):
            prog.add_eq({0: 1}, 1)


@pytest.mark.parametrize("method", METHODS)
def test_example1_programs(example1, method):
    local = compute_local_optima(example1)
    phases = decision_phases(example1, local, 5)
    configs = enumerate_configs(example1, phases, 5)
    values = solve_ip(build_decision_program(example1, phases, configs, 5), method)
    assert values is not None
    assert sum(values) == example1.m
    phases4 = decision_phases(example1, local, 4)
    configs4 = enumerate_configs(example1, phases4, 4)
    if not missing_phases(phases4, configs4):
        assert solve_ip(build_decision_program(example1, phases4, configs4, 4), method) is None


def test_fpt_example1(example1):
    r = fpt_makespan(example1)
    assert r.value == 5
    assert check_feasible(example1, r.schedule)


def test_fpt_one_job_per_machine():
    inst = Instance.from_lists([(4, [3, 1, 2])])
    assert fpt_makespan(inst).value == 3


@pytest.mark.parametrize("method", METHODS)
def test_fpt_matches_oracle(method):
    for inst in seeded_instances(30, 201, pmax=3):
        r = fpt_makespan(inst, method=method)
        assert r.value == solve_exact(inst, MAKESPAN).value
        local = compute_local_optima(inst)
        assert check_feasible(inst, r.schedule)
        assert is_individually_rational(inst, r.schedule, MAKESPAN, local)
        assert objective_value(r.schedule, None, MAKESPAN) == r.value


def test_f_override_retries():
    for inst in seeded_instances(20, 202, pmax=3):
        assert fpt_makespan(inst, f_override=0).value == fpt_makespan(inst).value


def test_reconstruction_reads_back():
    for inst in seeded_instances(40, 203, pmax=3):
        local = compute_local_optima(inst)
        T = solve_exact(inst, MAKESPAN).value
        phases, configs, values = _decide_T(inst, local, T, None, "highs")
        s = reconstruct(inst, phases, configs, values)
        assert check_feasible(inst, s)
        assert is_individually_rational(inst, s, MAKESPAN, local)
        chosen = Counter({c: v for c, v in zip(configs, values) if v})
        assert Counter(encode_schedule(inst, s, phases)) == chosen


def test_oracle_solutions_encode_to_program():
    hits = 0
    for inst in seeded_instances(40, 204, pmax=3):
        local = compute_local_optima(inst)
        r = solve_exact(inst, MAKESPAN)
        phases = decision_phases(inst, local, r.value)
        s = left_justify(inst, well_order(inst, r.schedule, phases))
        configs = enumerate_configs(inst, phases, r.value)
        counts = encode_schedule(inst, s, phases)
        if not set(counts) <= set(configs):
            continue
        hits += 1
        prog = build_decision_program(inst, phases, configs, r.value)
        assert prog.satisfied_by([counts.get(c, 0) for c in configs])
    assert hits >= 30
