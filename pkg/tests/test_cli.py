import json
import subprocess
import sys

import pytest

from toricstack import fixture_path
from toricstack.cli import DIAGNOSTIC_CODES, EXIT_FAIL, EXIT_INPUT, EXIT_PASS, main, parse_problem
from toricstack.errors import ParseError

from conftest import load_fixture


def run_cli(tmp_path, raw, *flags, name="problem"):
    path = tmp_path / f"{name}.json"
    path.write_text(json.dumps(raw))
    out = tmp_path / f"out-{name}"
    code = main(["--input", str(path), "--out", str(out), *flags])
    return code, out


def test_p1_validate_and_c2(tmp_path):
    raw = dict(load_fixture("p1"), tasks=["validate", "check-c2"])
    code, out = run_cli(tmp_path, raw)
    assert code == EXIT_PASS
    assert sorted(p.name for p in out.iterdir()) == ["00-validate.json", "01-check-c2.json", "summary.json"]


def test_malformed_ray_names_field(tmp_path):
    code, out = run_cli(tmp_path, load_fixture("fail_bad_ray"))
    assert code == EXIT_INPUT
    err = json.loads((out / "summary.json").read_text())["error"]
    assert err["code"] == "E_PARSE" and err["field"] == "rays[1]"


def test_non_adjacent_is_task_error(tmp_path):
    code, out = run_cli(tmp_path, load_fixture("fail_not_adjacent"))
    assert code == EXIT_INPUT
    task = json.loads((out / "summary.json").read_text())["tasks"][1]
    assert task["status"] == "error"
    assert task["error"]["cause"] == "E_NOT_ADJACENT" and task["error"]["field"] == "tasks[1]"


def test_invalid_fan_fails_verification(tmp_path):
    code, _ = run_cli(tmp_path, load_fixture("fail_invalid_fan"))
    assert code == EXIT_FAIL


def test_invalid_json_reports_line(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{\n  "group": {"rank": 1},\n  "rays": [[1], [-1]\n}')
    with pytest.raises(SystemExit):
        main([])
    assert main(["--input", str(path)]) == EXIT_INPUT


@pytest.mark.parametrize("field,value", [
    ("truncation", 1.5),
    ("truncation", "-1"),
    ("qrr_sign_convention", "sideways"),
    ("tasks", ["nonsense"]),
    ("degree_functional", ["1"]),
    ("max_cones", [[0], [7]]),
])
def test_parse_errors_name_field(field, value):
    raw = dict(load_fixture("p1"), **{field: value})
    with pytest.raises(ParseError) as exc:
        parse_problem(raw)
    assert exc.value.field.startswith(field)


def test_diagnostic_codes_are_distinct():
    assert len(set(DIAGNOSTIC_CODES)) == len(DIAGNOSTIC_CODES) >= 17
    assert all(code.startswith("E_") for code in DIAGNOSTIC_CODES)


def test_reports_are_deterministic_and_parallel_safe(tmp_path):
    raw = dict(load_fixture("p121"), truncation=2)
    _, a = run_cli(tmp_path, raw, name="a")
    _, b = run_cli(tmp_path, raw, name="b")
    _, c = run_cli(tmp_path, raw, "--jobs", "3", name="c")
    for f in sorted(p.name for p in a.iterdir()):
        assert (a / f).read_bytes() == (b / f).read_bytes() == (c / f).read_bytes()


def test_flags_override_file(tmp_path):
    raw = dict(load_fixture("p1"), tasks=["check-qrr"], truncation=3)
    code, out = run_cli(tmp_path, raw, "--truncation", "1", "--qrr-sign", "paper")
    assert code == EXIT_FAIL
    summary = json.loads((out / "summary.json").read_text())
    assert summary["truncation"] == "1" and summary["qrr_sign_convention"] == "paper"
    code, _ = run_cli(tmp_path, raw, "--truncation", "1", "--qrr-sign", "alternate", name="alt")
    assert code == EXIT_PASS


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "toricstack", "--input", str(fixture_path("c2z2"))],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.strip().splitlines()[-1] == "exit status 0"
