"""Tests for the gaugeloc command line."""

import pytest

from gaugeloc import report
from gaugeloc.cli import EXIT_INPUT, EXIT_PASS, main

SMALL = """\
schema = "gaugeloc-scenario/1"

[complexes.cyl]
time = { cells = 6 }
components = [{ axes = [{ kind = "circle", cells = 4 }] }]

[[analyses]]
kind = "cohomology-table"
complex = "cyl"

[[analyses]]
kind = "homotopy-check"
complex = "cyl"
"""


@pytest.fixture(autouse=True)
def _clean_env(monkeypatch):
    for name in ("GAUGELOC_THREADS", "GAUGELOC_MARGIN", "GAUGELOC_SEED", "GAUGELOC_LOG_LEVEL", "GAUGELOC_H"):
        monkeypatch.delenv(name, raising=False)


@pytest.fixture()
def small_scenario(tmp_path):
    path = tmp_path / "small.toml"
    path.write_text(SMALL, encoding="utf-8")
    return str(path)


def test_list_presets(capsys):
    assert main(["list-presets"]) == EXIT_PASS
    out = capsys.readouterr().out
    assert "maxwell-no-go-m2" in out
    assert "reproduces:" in out


def test_check_a_preset(capsys):
    assert main(["check", "preset:ym-aharonov-bohm"]) == EXIT_PASS
    assert "ok (2 analyses)" in capsys.readouterr().out


def test_unknown_preset_exits_2(capsys):
    assert main(["check", "preset:nothing-here"]) == EXIT_INPUT
    assert "nothing-here" in capsys.readouterr().err


def test_syntax_error_exits_2(tmp_path, capsys):
    path = tmp_path / "broken.toml"
    path.write_text("schema = \n", encoding="utf-8")
    assert main(["check", str(path)]) == EXIT_INPUT
    assert "line 1" in capsys.readouterr().err


def test_zero_threads_exit_2(small_scenario):
    assert main(["run", small_scenario, "--threads", "0"]) == EXIT_INPUT


def test_invalid_environment_exits_2(monkeypatch, capsys):
    monkeypatch.setenv("GAUGELOC_MARGIN", "0")
    assert main(["list-presets"]) == EXIT_INPUT
    assert "GAUGELOC_MARGIN" in capsys.readouterr().err


def test_unknown_log_level_exits_2():
    assert main(["--log-level", "chatty", "list-presets"]) == EXIT_INPUT


def test_run_writes_json_report(small_scenario, tmp_path):
    out = tmp_path / "report.json"
    assert main(["run", small_scenario, "--json", str(out), "--threads", "2"]) == EXIT_PASS
    data = report.load_json(out.read_text(encoding="utf-8"))
    assert [a["kind"] for a in data["analyses"]] == ["cohomology-table", "homotopy-check"]
    assert all(a["status"] == "pass" for a in data["analyses"])
    assert data["analyses"][0]["result"]["table"]["free/d"]["dims"] == [1, 1, 0]


def test_run_is_independent_of_thread_count(small_scenario, tmp_path):
    one, two = tmp_path / "one.json", tmp_path / "two.json"
    main(["run", small_scenario, "--json", str(one), "--threads", "1"])
    main(["run", small_scenario, "--json", str(two), "--threads", "2"])
    assert one.read_text(encoding="utf-8") == two.read_text(encoding="utf-8")
