"""Shared pytest fixtures for the gaugeloc test suite.

Preset complexes are cached process-wide, so session fixtures only hand out
the shared instances and their operator caches warm up once per run.
"""

import pytest

from gaugeloc.complex import build_complex
from gaugeloc.config import load_config
from gaugeloc.presets import complex_preset, embedding_preset


@pytest.fixture(scope="session")
def cyl2():
    """Time x circle of 8 cells."""
    return complex_preset("CYL2")


@pytest.fixture(scope="session")
def twostrip():
    return complex_preset("TWOSTRIP")


@pytest.fixture(scope="session")
def twocyl():
    return complex_preset("TWOCYL")


@pytest.fixture(scope="session")
def mink2():
    return complex_preset("MINK2")


@pytest.fixture(scope="session")
def ann3():
    """Time x 6x6 grid with a 2x2 hole (three-dimensional, slow to audit)."""
    return complex_preset("ANN3")


@pytest.fixture(scope="session")
def strips_to_cyls():
    return embedding_preset("TWOSTRIP->TWOCYL")


@pytest.fixture(scope="session")
def strips_to_line():
    return embedding_preset("TWOSTRIP->MINK2")


@pytest.fixture()
def small_cylinder():
    """A fresh time x circle-of-4 complex, for tests that must not share caches."""
    return build_complex({"time": {"cells": 4}, "margin": 1,
                          "components": [{"axes": [{"kind": "circle", "cells": 4}]}]})


@pytest.fixture()
def config():
    """Default configuration, independent of the caller's GAUGELOC_* environment."""
    return load_config({}).with_overrides(threads=2)
