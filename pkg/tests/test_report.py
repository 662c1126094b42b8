"""Tests for exact report rendering."""

import json
from fractions import Fraction

import pytest

from gaugeloc import report
from gaugeloc.ccr import Cyclotomic
from gaugeloc.report import PiMultiple


def _results():
    return [
        {"kind": "maxwell-audit", "params": {"k": 1}, "status": "pass",
         "result": {"pairing": PiMultiple(Fraction(-1, 2)), "ratio": Fraction(3), "dims": (1, 1, 0), "ok": True}},
        {"kind": "no-go", "params": {}, "status": "error", "error": "ComplexMismatch: different sources"},
    ]


def test_exact_values_are_strings():
    data = report.to_jsonable({"half": Fraction(1, 2), "turn": PiMultiple(Fraction(1)), "n": 3, "flag": False})
    assert data == {"half": "1/2", "turn": "1·π", "n": 3, "flag": False}


def test_cyclotomic_renders_symbolically():
    assert report.to_jsonable(Cyclotomic.phase(Fraction(1, 3), 2)) == "2·exp(iπ·1/3)"
    assert report.to_jsonable(Cyclotomic()) == "0"


def test_unknown_values_are_refused():
    with pytest.raises(TypeError):
        report.to_jsonable({"x": object()})


def test_parse_exact_restores_numbers():
    assert report.parse_exact(["-3/4", "2·π", "name", 5]) == [Fraction(-3, 4), PiMultiple(Fraction(2)), "name", 5]


def test_json_is_deterministic():
    a = report.build_report("preset:x", _results())
    b = dict(reversed(list(report.build_report("preset:x", _results()).items())))
    assert report.to_json(a) == report.to_json(b)
    parsed = json.loads(report.to_json(a))
    assert parsed["schema"] == report.SCHEMA
    assert "time" not in json.dumps(parsed["environment"])


def test_loaded_report_keeps_exact_values():
    loaded = report.load_json(report.to_json(report.build_report("preset:x", _results())))
    result = loaded["analyses"][0]["result"]
    assert result["pairing"] == PiMultiple(Fraction(-1, 2))
    assert result["ratio"] == 3
    assert result["dims"] == [1, 1, 0]


def test_text_report_lists_each_analysis():
    text = report.to_text(report.build_report("preset:x", _results()))
    assert "[0] maxwell-audit: pass" in text
    assert "[1] no-go: error" in text
    assert "ComplexMismatch: different sources" in text
    assert "-1/2·π" in text
