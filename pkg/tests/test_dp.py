import pytest
from conftest import EXAMPLE1_SUMC, seeded_instances

from mosched.core import (
    MAKESPAN,
    SUM_COMPLETION,
    Instance,
    check_feasible,
    is_individually_rational,
    objective_value,
)
from mosched.dp import dp_makespan, dp_sumc, estimate_sumc_states
from mosched.errors import ResourceLimitError
from mosched.gadgets import ThreePartitionInstance, gen_sumc_hardness
from mosched.local import compute_local_optima, opt_local_makespan
from mosched.oracle import solve_exact


def check(inst, result, kind):
    local = compute_local_optima(inst)
    assert check_feasible(inst, result.schedule)
    assert is_individually_rational(inst, result.schedule, kind, local)
    assert objective_value(result.schedule, None, kind) == result.value


def test_example1(example1):
    r = dp_makespan(example1)
    assert r.value == 5
    check(example1, r, MAKESPAN)
    r = dp_sumc(example1)
    assert r.value == EXAMPLE1_SUMC
    check(example1, r, SUM_COMPLETION)


def test_single_org_is_local():
    for jobs in ([3, 3, 3], [5, 4, 3, 3, 2, 1], [7]):
        inst = Instance.from_lists([(2, jobs)])
        assert dp_makespan(inst).value == opt_local_makespan(2, jobs)[0]


def test_single_job_sumc():
    assert dp_sumc(Instance.from_lists([(2, [4])])).value == 4


def test_sumc_gadget_yes():
    out = gen_sumc_hardness(ThreePartitionInstance(13, (4, 4, 5, 4, 4, 5)))
    r = dp_sumc(out.instance)
    assert r.value == out.target == 130
    check(out.instance, r, SUM_COMPLETION)


def test_state_caps():
    inst = Instance.from_lists([(3, [5, 4, 3, 3, 2, 2, 1, 1])])
    with pytest.raises(ResourceLimitError) as info:
        dp_makespan(inst, state_cap=3)
    assert info.value.reason == "resource_limit"
    with pytest.raises(ResourceLimitError):
        dp_sumc(inst, state_cap=3)


def test_estimate_grows():
    small = Instance.from_lists([(1, [1])])
    big = Instance.from_lists([(3, [5, 4, 3, 3, 2, 2, 1, 1])])
    assert estimate_sumc_states(small) < estimate_sumc_states(big)


def test_makespan_matches_oracle():
    for inst in seeded_instances(30, 101):
        r = dp_makespan(inst)
        assert r.value == solve_exact(inst, MAKESPAN).value
        check(inst, r, MAKESPAN)


def test_merge_is_safe():
    for inst in seeded_instances(40, 102, max_n=7):
        assert dp_makespan(inst).value == dp_makespan(inst, merge=False).value


def test_sumc_matches_oracle():
    for inst in seeded_instances(40, 103, max_n=7, pmax=4):
        r = dp_sumc(inst)
        assert r.value == solve_exact(inst, SUM_COMPLETION).value
        check(inst, r, SUM_COMPLETION)
