import csv
import io
import json
import random
import subprocess
import sys

import pytest
from conftest import EXAMPLE1_SUMC, example2_schedule, random_small_instance
from hypothesis import given, settings
from hypothesis import strategies as st

from mosched.cli import (
    BENCH_HEADER,
    EXIT_NO,
    EXIT_OK,
    EXIT_RESOURCE,
    EXIT_USAGE,
    bench,
    main,
)
from mosched.core import MAKESPAN, SUM_COMPLETION, Instance
from mosched.errors import MalformedScheduleError, ValidationError
from mosched.io import (
    instance_from_dict,
    instance_to_dict,
    parse_instance,
    parse_schedule,
    schedule_from_list,
    schedule_to_list,
    write_instance,
    write_schedule,
)
from mosched.local import local_union_schedule


@pytest.fixture
def ex1_file(tmp_path, example1):
    path = tmp_path / "ex1.json"
    write_instance(example1, path)
    return path


class TestIO:
    def test_example1_file(self, ex1_file):
        inst = parse_instance(ex1_file)
        assert (inst.k, inst.m, inst.n) == (2, 3, 9)

    def test_empty_orgs(self):
        with pytest.raises(ValidationError):
            instance_from_dict({"organizations": []})

    def test_field_context(self):
        with pytest.raises(ValidationError, match="organization 2"):
            instance_from_dict({"organizations": [{"machines": 1, "jobs": [1]},
                                                  {"machines": 0, "jobs": [1]}]})
        with pytest.raises(ValidationError, match="job 2"):
            instance_from_dict({"organizations": [{"machines": 1, "jobs": [1, 0]}]})

    def test_bad_json(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text('{"organizations": [\n  {"machines": 1,,}]}')
        with pytest.raises(ValidationError, match="line 2"):
            parse_instance(p)

    def test_schedule_round_trip(self, tmp_path, example1):
        s = example2_schedule()
        write_schedule(s, tmp_path / "s.json")
        assert parse_schedule(tmp_path / "s.json").as_dict() == s.as_dict()
        assert schedule_from_list({"schedule": schedule_to_list(s)}).as_dict() == s.as_dict()

    def test_schedule_malformed(self):
        with pytest.raises(MalformedScheduleError):
            schedule_from_list([{"org": 1, "job": 1, "machine": 1}])
        with pytest.raises(MalformedScheduleError):
            schedule_from_list({"rows": []})


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**9))
def test_instance_round_trip(seed):
    inst = random_small_instance(random.Random(seed))
    assert instance_from_dict(json.loads(json.dumps(instance_to_dict(inst)))) == inst


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


class TestSolve:
    @pytest.mark.parametrize("algorithm", ["auto", "bruteforce", "dp", "ilp"])
    def test_makespan(self, capsys, ex1_file, algorithm):
        code, out, _ = run(capsys, "solve", ex1_file, "--algorithm", algorithm)
        assert code == EXIT_OK
        assert json.loads(out)["value"] == 5

    @pytest.mark.parametrize("algorithm", ["auto", "bruteforce", "dp"])
    def test_sumc(self, capsys, ex1_file, algorithm):
        code, out, _ = run(capsys, "solve", ex1_file, "--objective", "sumc",
                           "--algorithm", algorithm)
        assert code == EXIT_OK
        assert json.loads(out)["value"] == EXAMPLE1_SUMC

    def test_ilp_sumc_is_usage_error(self, capsys, ex1_file):
        code, _, err = run(capsys, "solve", ex1_file, "--objective", "sumc", "--algorithm", "ilp")
        assert code == EXIT_USAGE and "makespan" in err

    def test_decision(self, capsys, ex1_file):
        assert run(capsys, "solve", ex1_file, "--target", 5)[:2] == (EXIT_OK, "yes\n")
        assert run(capsys, "solve", ex1_file, "--target", 2)[:2] == (EXIT_NO, "no\n")
        code, out, _ = run(capsys, "solve", ex1_file, "--target", 4, "--algorithm", "dp")
        assert (code, out) == (EXIT_NO, "no\n")

    def test_budget_exit(self, capsys, tmp_path):
        inst = Instance.from_lists([(2, [5, 4, 3, 3, 2, 2, 1]), (2, [4, 4, 3, 2, 2, 1])])
        write_instance(inst, tmp_path / "i.json")
        code, _, err = run(capsys, "solve", tmp_path / "i.json", "--objective", "sumc",
                           "--algorithm", "bruteforce", "--budget", 10)
        assert code == EXIT_RESOURCE
        payload = json.loads(err)
        assert payload["error"] == "budget_exceeded" and "incumbent_value" in payload

    def test_missing_file(self, capsys, tmp_path):
        assert run(capsys, "solve", tmp_path / "nope.json")[0] == EXIT_USAGE

    def test_bad_flag(self, capsys, ex1_file):
        assert run(capsys, "solve", ex1_file, "--algorithm", "magic")[0] == EXIT_USAGE

    def test_output_then_verify(self, capsys, tmp_path, ex1_file):
        for objective in ("makespan", "sumc"):
            out = tmp_path / f"{objective}.json"
            code, printed, _ = run(capsys, "solve", ex1_file, "--objective", objective, "-o", out)
            assert code == EXIT_OK and printed.strip() == str(json.loads(out.read_text())["value"])
            assert run(capsys, "verify", ex1_file, out, "--objective", objective)[0] == EXIT_OK


class TestVerify:
    @pytest.fixture
    def ex2_file(self, tmp_path):
        p = tmp_path / "ex2.json"
        write_schedule(example2_schedule(), p)
        return p

    def test_example2_makespan(self, capsys, ex1_file, ex2_file):
        code, out, _ = run(capsys, "verify", ex1_file, ex2_file)
        assert code == EXIT_OK
        assert "individually rational: yes" in out and "value: 5" in out

    def test_example2_sumc(self, capsys, ex1_file, ex2_file):
        code, out, _ = run(capsys, "verify", ex1_file, ex2_file, "--objective", "sumc")
        assert code == EXIT_NO
        assert "org 1: sumc 15 vs local 12 VIOLATED" in out
        assert "feasible: yes" in out

    def test_local_union(self, capsys, tmp_path, ex1_file, example1):
        for kind, name in ((MAKESPAN, "makespan"), (SUM_COMPLETION, "sumc")):
            p = tmp_path / f"u_{name}.json"
            write_schedule(local_union_schedule(example1, kind), p)
            for objective in ("makespan", "sumc"):
                assert run(capsys, "verify", ex1_file, p, "--objective", objective)[0] == EXIT_OK

    def test_malformed(self, capsys, tmp_path, ex1_file):
        p = tmp_path / "bad.json"
        p.write_text('[{"org": 1, "job": 1, "machine": 9, "completion": 3}]')
        code, out, _ = run(capsys, "verify", ex1_file, p)
        assert code == EXIT_NO and "malformed" in out


class TestGenerate:
    def test_random_deterministic(self, capsys, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        run(capsys, "generate", "random", "--seed", 4, "-o", a)
        run(capsys, "generate", "random", "--seed", 4, "-o", b)
        assert a.read_text() == b.read_text()

    def test_random_ranges(self, capsys):
        code, out, _ = run(capsys, "generate", "random", "--orgs", "2:2", "--machines", "3",
                           "--jobs", "1:2", "--pmax", 2)
        inst = instance_from_dict(json.loads(out))
        assert code == EXIT_OK and inst.k == 2
        assert all(o.machines == 3 and 1 <= len(o.jobs) <= 2 for o in inst.organizations)
        assert inst.pmax <= 2

    def test_sumc_np(self, capsys, tmp_path):
        p = tmp_path / "g.json"
        code, _, _ = run(capsys, "generate", "sumc-np", "--tp", "13:4,4,5,4,4,5", "-o", p)
        assert code == EXIT_OK
        assert parse_instance(p).k == 4
        assert json.loads((tmp_path / "g.json.cert.json").read_text())["target"] == 130

    def test_theta2p(self, capsys, tmp_path):
        p = tmp_path / "t.json"
        assert run(capsys, "generate", "theta2p", "--v", 1, "-o", p)[0] == EXIT_OK
        assert parse_instance(p).k == 11

    def test_other_gadgets(self, capsys):
        code, out, _ = run(capsys, "generate", "dp-hard", "--tp", "6:2,2,2",
                           "--tp2", "13:4,4,4,4,4,6")
        assert code == EXIT_OK and instance_from_dict(json.loads(out)).k == 2
        code, out, _ = run(capsys, "generate", "binpack", "--integers", "2,2,2",
                           "--capacity", 3, "--bins", 3)
        assert code == EXIT_OK and instance_from_dict(json.loads(out)).k == 4

    def test_rejections(self, capsys):
        assert run(capsys, "generate", "sumc-np")[0] == EXIT_USAGE
        assert run(capsys, "generate", "sumc-np", "--tp", "10:1,2,7")[0] == EXIT_USAGE
        assert run(capsys, "generate", "sumc-np", "--tp", "x")[0] == EXIT_USAGE
        assert run(capsys, "generate", "random", "--orgs", "3:1")[0] == EXIT_USAGE


class TestBench:
    def rows(self, report):
        body = [ln for ln in report.splitlines() if not ln.startswith("#")]
        return list(csv.DictReader(io.StringIO("\n".join(body))))

    def test_empty_directory(self, capsys, tmp_path):
        code, out, _ = run(capsys, "bench", tmp_path)
        assert code == EXIT_OK
        assert out.splitlines() == [",".join(BENCH_HEADER), "# consistency", "# mismatches,0"]

    def test_suite_consistent(self, tmp_path):
        rng = random.Random(1)
        for i in range(6):
            write_instance(random_small_instance(rng, max_n=6, pmax=3), tmp_path / f"i{i}.json")
        report = bench(tmp_path, ["bruteforce", "dp", "ilp"], "makespan", workers=2)
        rows = self.rows(report)
        assert len(rows) == 18 and all(r["status"] == "ok" for r in rows)
        assert [r["instance"] for r in rows] == sorted(r["instance"] for r in rows)
        assert report.endswith("# mismatches,0\n")

    def test_budget_row(self, tmp_path):
        inst = Instance.from_lists([(2, [5, 4, 3, 3, 2, 2, 1]), (2, [4, 4, 3, 2, 2, 1])])
        write_instance(inst, tmp_path / "i.json")
        rows = self.rows(bench(tmp_path, ["bruteforce", "ilp"], "sumc", budget=10))
        assert rows[0]["status"] == "budget_exceeded" and rows[0]["proven_optimal"] == "false"
        assert rows[1]["status"] == "unsupported"

    def test_time_limit(self, tmp_path, example1):
        write_instance(example1, tmp_path / "e.json")
        rows = self.rows(bench(tmp_path, ["dp"], "makespan", time_limit=60))
        assert rows[0]["status"] == "ok" and rows[0]["value"] == "5"

    def test_not_a_directory(self, capsys, ex1_file):
        assert run(capsys, "bench", ex1_file)[0] == EXIT_USAGE


def test_console_entry(ex1_file):
    proc = subprocess.run([sys.executable, "-m", "mosched.cli", "solve", str(ex1_file)],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and json.loads(proc.stdout)["value"] == 5
