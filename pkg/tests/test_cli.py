import json

import pytest

from rttdegen.cli import (
    EXIT_FAIL,
    EXIT_PASS,
    EXIT_USAGE,
    SCHEMA_VERSION,
    SUITES,
    InvalidConfig,
    SuiteConfig,
    UnknownSuite,
    emit_report,
    exit_code,
    main,
    report_from_json,
    run_suite,
)
from rttdegen.report import FAIL, INCONCLUSIVE, PASS, CheckRecord, Report


def test_ybe_suite_passes():
    rep = run_suite("ybe", N=2)
    assert rep.verdict == PASS
    assert len(rep.checks) == 2


def test_graded_relation_suite_carries_certificates():
    rep = run_suite("graded-relation", N=2, Mmax=1)
    assert rep.verdict == PASS
    certs = [c.certificate for c in rep.checks if c.certificate]
    assert certs and all(c["verified"] for c in certs)


def test_invalid_dimension_is_a_config_error():
    with pytest.raises(InvalidConfig):
        run_suite("ybe", N=0)


@pytest.mark.parametrize("bad", [dict(case="sp", n=3), dict(jobs=0), dict(rmax=-1), dict(order=2),
                                 dict(case="gl"), dict(relation_levels=-1)])
def test_config_validation(bad):
    with pytest.raises(InvalidConfig):
        SuiteConfig(**bad).validate()


def test_both_cases_with_odd_n_drops_symplectic():
    assert SuiteConfig(n=3, case="both").validate().cases == ("o",)


def test_unknown_suite():
    with pytest.raises(UnknownSuite):
        run_suite("nope")


def test_unknown_setting():
    with pytest.raises(InvalidConfig):
        run_suite("ybe", colour=1)


def test_empty_report_json():
    d = json.loads(emit_report(Report("ybe")))
    assert d["suite"] == "ybe"
    assert d["checks"] == []
    assert d["schema_version"] == SCHEMA_VERSION
    assert d["verdict"] == PASS


def test_single_record_json():
    rep = Report("ybe", {"n": 2})
    rep.add(CheckRecord("ybe", {"kind": "yangian"}, PASS, wall_time=0.5))
    d = json.loads(emit_report(rep))
    assert d["checks"] == [{"name": "ybe", "params": {"kind": "yangian"}, "verdict": "pass",
                            "certificate": None, "detail": None, "method": None}]
    assert json.loads(emit_report(rep, timings=True))["checks"][0]["wall_time"] == 0.5


def test_round_trip_of_a_real_report():
    rep = run_suite("scong", mmax=0)
    back = report_from_json(json.loads(emit_report(rep, timings=True)))
    assert emit_report(back, timings=True) == emit_report(rep, timings=True)
    assert back.verdict == rep.verdict


def test_schema_version_is_checked():
    d = json.loads(emit_report(Report("ybe")))
    d["schema_version"] = "0.1"
    with pytest.raises(ValueError):
        report_from_json(d)


def test_markdown_has_one_row_per_check():
    rep = Report("x")
    rep.add(CheckRecord("a|b", {"k": 1}, PASS))
    rep.add(CheckRecord("c", {}, FAIL, detail="bad"))
    text = emit_report(rep, "md").decode()
    rows = [ln for ln in text.splitlines() if ln.startswith("| ") and not ln.startswith("| #")]
    assert len(rows) == 2
    assert "a\\|b" in rows[0]
    assert "**fail**" in text


def test_exit_codes():
    rep = Report("x")
    assert exit_code(rep) == 0
    rep.add(CheckRecord("a", {}, INCONCLUSIVE))
    assert exit_code(rep) == 2
    rep.add(CheckRecord("b", {}, FAIL))
    assert exit_code(rep) == 1


def test_main_pass_and_output_file(tmp_path):
    out = tmp_path / "r.json"
    assert main(["ybe", "--n", "2", "--out", str(out)]) == EXIT_PASS
    assert json.loads(out.read_text())["verdict"] == PASS


def test_main_negative_control(capsys):
    assert main(["ybe", "--negative-control"]) == EXIT_FAIL
    assert json.loads(capsys.readouterr().out)["verdict"] == FAIL


def test_main_usage_errors(capsys):
    assert main(["ybe", "--n", "0"]) == EXIT_USAGE
    with pytest.raises(SystemExit) as info:
        main(["no-such-suite"])
    assert info.value.code == EXIT_USAGE
    with pytest.raises(SystemExit) as info:
        main(["ybe", "--n", "two"])
    assert info.value.code == EXIT_USAGE


def test_config_file_and_flag_precedence(tmp_path, capsys):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("# suite settings\nn = 3\nrmax = 2  # small\n")
    assert main(["ybe", "--config", str(cfg)]) == EXIT_PASS
    echoed = json.loads(capsys.readouterr().out)["config"]
    assert echoed["n"] == 3 and echoed["rmax"] == 2
    assert main(["ybe", "--config", str(cfg), "--n", "1"]) == EXIT_PASS
    assert json.loads(capsys.readouterr().out)["config"]["n"] == 1


def test_bad_config_file(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("flavour = 3\n")
    assert main(["ybe", "--config", str(cfg)]) == EXIT_USAGE
    assert main(["ybe", "--config", str(tmp_path / "missing")]) == EXIT_USAGE


def test_output_is_deterministic_across_jobs(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    main(["rs-identity", "--jobs", "1", "--out", str(a)])
    main(["rs-identity", "--jobs", "3", "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_every_suite_is_registered():
    assert set(SUITES) == {"ybe", "rtt-expansion", "yangian-pbw", "embed-ytw", "qloop-classical-limit",
                           "rs-identity", "graded-relation", "scong", "twisted-phi", "separation"}
