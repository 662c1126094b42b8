"""Tests for scenario parsing, validation and preset resolution."""

import pytest

from gaugeloc.errors import ParseError, ValidationError
from gaugeloc.presets import SCENARIOS_BY_NAME, complex_preset, embedding_preset
from gaugeloc.scenario import SCHEMA, from_mapping, load_scenario, parse_toml

SMALL = """\
schema = "gaugeloc-scenario/1"

[complexes.cyl]
margin = 1
time = { cells = 4 }
components = [{ axes = [{ kind = "circle", cells = 4 }] }]

[[analyses]]
kind = "cohomology-table"
complex = "cyl"
"""


def _scenario(**overrides):
    data = {
        "schema": SCHEMA,
        "complexes": {"strips": {"preset": "TWOSTRIP"}, "line": {"preset": "MINK2"}},
        "embeddings": {"f": {"preset": "TWOSTRIP->TWOCYL"}, "h": {"preset": "TWOSTRIP->MINK2"}},
        "analyses": [],
    }
    data.update(overrides)
    return data


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------


def test_small_file_loads(tmp_path):
    path = tmp_path / "small.toml"
    path.write_text(SMALL, encoding="utf-8")
    scenario = load_scenario(str(path))
    assert scenario.complex("cyl").n_time == 4
    assert [a.kind for a in scenario.analyses] == ["cohomology-table"]


def test_syntax_error_carries_location():
    with pytest.raises(ParseError) as excinfo:
        parse_toml('schema = "gaugeloc-scenario/1"\nkind = \n')
    assert excinfo.value.line == 2
    assert excinfo.value.column is not None
    assert "line 2" in str(excinfo.value)


def test_missing_file_is_a_validation_error(tmp_path):
    with pytest.raises(ValidationError):
        load_scenario(str(tmp_path / "absent.toml"))


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("overrides, needle", [
    ({"schema": "other/1"}, "schema"),
    ({"extra": 1}, "unknown key(s) extra"),
    ({"analyses": [{"complex": "strips"}]}, "needs a kind"),
    ({"analyses": [{"kind": "wiggle", "complex": "strips"}]}, "unknown kind"),
    ({"analyses": [{"kind": "maxwell-audit", "complex": "strips"}]}, "missing k"),
    ({"analyses": [{"kind": "maxwell-audit", "complex": "nowhere", "k": 1}]}, "unknown complex"),
    ({"analyses": [{"kind": "maxwell-audit", "complex": "strips", "k": "1"}]}, "k must be an integer"),
    ({"analyses": [{"kind": "maxwell-audit", "complex": "strips", "k": True}]}, "k must be an integer"),
    ({"analyses": [{"kind": "maxwell-audit", "complex": "line", "k": 1, "disjoint": ["h"]}]}, "exactly two"),
    ({"analyses": [{"kind": "ym-character-audit", "complex": "strips", "h": "-1/2"}]}, "positive rational"),
    ({"analyses": [{"kind": "no-go", "f": "f", "h": "g", "k": 1, "layer": "maxwell"}]}, "unknown embedding"),
    ({"analyses": [{"kind": "no-go", "f": "f", "h": "h", "k": 1, "layer": "quantum"}]}, "layer must be"),
    ({"analyses": [{"kind": "isotony", "regions": ["f"], "target": "line", "layer": "maxwell"}]}, "embed into"),
    ({"analyses": [{"kind": "propagator-check", "complex": "strips", "k": 3}]}, "k=3 is outside 0..2"),
    ({"analyses": [{"kind": "no-go", "f": "f", "h": "h", "k": -1, "layer": "maxwell"}]}, "outside"),
])
def test_invalid_scenarios_are_refused(overrides, needle):
    with pytest.raises(ValidationError) as excinfo:
        from_mapping(_scenario(**overrides), "test")
    assert needle in str(excinfo.value)


def test_bad_complex_is_reported_by_name():
    data = _scenario(complexes={"tiny": {"time": {"cells": 2}, "components": [{"axes": [{"kind": "circle",
                                                                                          "cells": 2}]}]}},
                     embeddings={})
    with pytest.raises(ValidationError) as excinfo:
        from_mapping(data, "test")
    assert excinfo.value.context["complex"] == "tiny"


def test_embedding_needs_known_complexes():
    data = _scenario(embeddings={"e": {"source": "strips", "target": "ghost",
                                       "placements": [{"component": 0, "offsets": [0, 0]}]}})
    with pytest.raises(ValidationError) as excinfo:
        from_mapping(data, "test")
    assert excinfo.value.context["embedding"] == "e"


def test_unknown_preset_names():
    with pytest.raises(ValidationError):
        load_scenario("preset:nothing-here")
    with pytest.raises(ValidationError):
        from_mapping(_scenario(complexes={"x": {"preset": "KLEIN"}}, embeddings={}), "test")


# ---------------------------------------------------------------------------
# Presets
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("name", sorted(SCENARIOS_BY_NAME))
def test_every_preset_scenario_validates(name):
    scenario = load_scenario(f"preset:{name}")
    assert scenario.name == f"preset:{name}"
    assert scenario.analyses


def test_preset_resolution_shares_instances():
    scenario = from_mapping(_scenario(), "test")
    assert scenario.complex("strips") is complex_preset("TWOSTRIP")
    assert scenario.embedding("h") is embedding_preset("TWOSTRIP->MINK2")
