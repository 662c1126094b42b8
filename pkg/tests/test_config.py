"""Tests for GAUGELOC_* environment validation."""

from fractions import Fraction

import pytest

from gaugeloc.config import DEFAULT_MARGIN, load_config


def test_defaults_when_nothing_is_set():
    config = load_config({})
    assert config.margin == DEFAULT_MARGIN
    assert config.seed == 0
    assert config.log_level == "WARNING"
    assert config.h == 1
    assert config.threads >= 1


def test_values_are_parsed():
    config = load_config({
        "GAUGELOC_THREADS": "3",
        "GAUGELOC_MARGIN": "1",
        "GAUGELOC_SEED": "-7",
        "GAUGELOC_LOG_LEVEL": "debug",
        "GAUGELOC_H": "3/2",
    })
    assert config.threads == 3
    assert config.margin == 1
    assert config.seed == -7
    assert config.log_level == "DEBUG"
    assert config.h == Fraction(3, 2)


@pytest.mark.parametrize("env, needle", [
    ({"GAUGELOC_THREADS": "0"}, "GAUGELOC_THREADS=0"),
    ({"GAUGELOC_THREADS": "many"}, "GAUGELOC_THREADS='many'"),
    ({"GAUGELOC_MARGIN": "0"}, "GAUGELOC_MARGIN=0"),
    ({"GAUGELOC_SEED": "1.5"}, "GAUGELOC_SEED='1.5'"),
    ({"GAUGELOC_LOG_LEVEL": "LOUD"}, "GAUGELOC_LOG_LEVEL='LOUD'"),
    ({"GAUGELOC_H": "-1"}, "GAUGELOC_H=-1"),
    ({"GAUGELOC_H": "1/0"}, "GAUGELOC_H='1/0'"),
])
def test_invalid_value_is_reported(env, needle):
    with pytest.raises(RuntimeError) as excinfo:
        load_config(env)
    message = str(excinfo.value)
    assert "configuration is invalid" in message
    assert needle in message


def test_all_problems_are_listed_together():
    """Every bad variable appears in the one error, not just the first."""
    with pytest.raises(RuntimeError) as excinfo:
        load_config({"GAUGELOC_MARGIN": "x", "GAUGELOC_H": "0"})
    message = str(excinfo.value)
    assert "GAUGELOC_MARGIN" in message
    assert "GAUGELOC_H=0" in message


def test_overrides_skip_none():
    config = load_config({"GAUGELOC_SEED": "4"})
    changed = config.with_overrides(seed=None, margin=3)
    assert changed.seed == 4
    assert changed.margin == 3
    assert config.margin == DEFAULT_MARGIN
