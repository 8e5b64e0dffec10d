import json
import subprocess
import sys

import pytest

from qcert import __version__
from qcert.cli import CheckReport, RunConfig, UsageError, emit_report, main, parse_int_list, report_document, run


def run_main(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_parse_int_list():
    assert parse_int_list("3..6") == [3, 4, 5, 6]
    assert parse_int_list("3,5..6, 9") == [3, 5, 6, 9]
    for bad in ("", "5..3", "x", "1..y"):
        with pytest.raises(UsageError):
            parse_int_list(bad)


def test_identity_suite(capsys):
    code, out, _ = run_main(["identity", "--n", "1..12"], capsys)
    assert code == 0
    rows = [l for l in out.splitlines() if l.startswith("pass")]
    assert len(rows) == 12
    assert "(q^{2n}+1)^4" in out


def test_congruence_suite_skips_even(capsys):
    code, out, _ = run_main(["congruence", "--family", "refined", "--n", "3..15", "--M", "both"], capsys)
    assert code == 0
    assert "skipped" in out
    assert "[n]_{q^2}^4 Phi_n(q^2)" in out
    rows = [l for l in out.splitlines() if l.startswith("pass")]
    assert len(rows) == 14


def test_corollary_suite(capsys):
    code, out, _ = run_main(["corollary", "--p", "3,5", "--r", "1", "--M", "both"], capsys)
    assert code == 0
    assert len([l for l in out.splitlines() if l.startswith("pass")]) == 4


@pytest.mark.parametrize("command", ["identity-param --n 2..4", "induction --n 1..5", "lemmas --n 3..5",
                                     "classical --n 1..5", "congruence --family weak --n 3..7",
                                     "congruence --family param --n 3..5"])
def test_other_suites_pass(command, capsys):
    assert run_main(command.split(), capsys)[0] == 0


def test_usage_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["congruence", "--family", "nope"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2
    assert run_main(["identity", "--n", "5..1"], capsys)[0] == 2
    assert run_main(["corollary", "--p", "9"], capsys)[0] == 2
    assert run_main(["identity", "--jobs", "0"], capsys)[0] == 2


def test_eval_parse_error_exit_2(capsys):
    code, _, err = run_main(["eval", "--expr", "qint(3;"], capsys)
    assert code == 2
    assert "offset 7" in err


def test_eval_congruence(capsys):
    args = ["eval", "--expr", "sum(k, 0, n-1, qint(4*k-1;2)*qint(4*k-1;1)^2*poch(-2;4;k)^4/poch(4;4;k)^4*q^(4*k))",
            "--rhs", "(2*q + 2/q - 1)*qint(n;2)^4", "--mod", "qint(n;2)^4*cyc2(n)", "--bind", "n=5"]
    code, out, _ = run_main(args, capsys)
    assert code == 0 and "pass" in out
    args[4] = "(2*q + 2/q)*qint(n;2)^4"
    assert run_main(args, capsys)[0] == 1


def test_eval_value(capsys):
    code, out, _ = run_main(["eval", "--expr", "qbinom(4,2)"], capsys)
    assert code == 0
    assert out.strip() == "q^4 + q^3 + 2*q^2 + q + 1"


def test_report_schema(tmp_path, capsys):
    path = tmp_path / "r.json"
    code, _, _ = run_main(["congruence", "--n", "3..5", "--M", "half", "--json", str(path)], capsys)
    assert code == 0
    doc = json.loads(path.read_text())
    assert set(doc) == {"tool_version", "checks", "summary"}
    assert doc["tool_version"] == __version__
    assert doc["summary"] == {"pass": 2, "fail": 0, "ill_posed": 0, "error": 0}
    check = doc["checks"][0]
    assert set(check) == {"check_id", "params", "status", "residual_summary", "degrees", "elapsed_ms"}
    assert check["check_id"] == "congruence/refined/n=003/M=half"
    ids = [c["check_id"] for c in doc["checks"]]
    assert ids == sorted(ids) and len(set(ids)) == len(ids)


def test_empty_and_single_reports():
    empty = json.loads(report_document([]))
    assert empty["checks"] == [] and empty["summary"] == {"pass": 0, "fail": 0, "ill_posed": 0, "error": 0}
    one = json.loads(report_document([CheckReport("x", {}, "pass", "", [], 1)]))
    assert one["summary"] == {"pass": 1, "fail": 0, "ill_posed": 0, "error": 0}
    mixed = [CheckReport("b", {}, "ill-posed", "", [], 0), CheckReport("a", {}, "fail", "", [], 0)]
    doc = json.loads(report_document(mixed))
    assert [c["check_id"] for c in doc["checks"]] == ["a", "b"]
    assert doc["summary"] == {"pass": 0, "fail": 1, "ill_posed": 1, "error": 0}


def test_report_io_failure(tmp_path, capsys):
    target = tmp_path / "missing" / "r.json"
    code, _, err = run_main(["identity", "--n", "1..2", "--json", str(target)], capsys)
    assert code == 1
    assert "cannot write report" in err
    assert not target.exists()


def test_partial_file_removed(tmp_path, monkeypatch):
    target = tmp_path / "r.json"
    real_open = open

    class Broken:
        def __init__(self, *a, **k):
            self.fh = real_open(target, "w")

        def __enter__(self):
            return self

        def __exit__(self, *exc):
            self.fh.close()

        def write(self, text):
            self.fh.write(text[:10])
            self.fh.flush()
            raise OSError("disk full")

    monkeypatch.setattr("qcert.cli.open", Broken, raising=False)
    with pytest.raises(OSError):
        emit_report([CheckReport("x", {}, "pass", "", [], 1)], str(target))
    monkeypatch.undo()
    assert not target.exists()


def test_failing_check_exits_1(capsys, monkeypatch):
    from qcert import congruence
    from qcert.congruence import Verdict

    monkeypatch.setattr(congruence, "verify_identity", lambda n: Verdict("fail", "forced"))
    assert run_main(["identity", "--n", "1..2"], capsys)[0] == 1
    monkeypatch.setattr(congruence, "verify_identity", lambda n: 1 / 0)
    code, out, _ = run_main(["identity", "--n", "1"], capsys)
    assert code == 1 and "error" in out


def test_parallel_matches_serial(tmp_path):
    serial, parallel = tmp_path / "s.json", tmp_path / "p.json"
    base = [sys.executable, "-m", "qcert.cli", "congruence", "--n", "3..9", "--no-timing"]
    subprocess.run(base + ["--jobs", "1", "--json", str(serial)], check=True, capture_output=True)
    subprocess.run(base + ["--jobs", "3", "--json", str(parallel)], check=True, capture_output=True)
    assert serial.read_bytes() == parallel.read_bytes()


def test_run_config_direct(capsys):
    cfg = RunConfig(command="classical", n_range=[1, 2, 3])
    assert run(cfg) == 0
    assert "classical/limit/k=003" in capsys.readouterr().out


def test_jobs_capped_by_environment(monkeypatch):
    from qcert.cli import max_jobs

    monkeypatch.setenv("QCERT_MAX_JOBS", "2")
    assert max_jobs(8) == 2
    monkeypatch.delenv("QCERT_MAX_JOBS")
    assert max_jobs(8) == 8
