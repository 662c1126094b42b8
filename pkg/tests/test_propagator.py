"""Tests for the retarded and advanced Green operators."""

import pytest

from gaugeloc.complex import Cell, Cochain, build_complex
from gaugeloc.errors import BadDegree, MarginViolation, NonHyperbolic, ShadowOverflow
from gaugeloc.presets import embedding_preset
from gaugeloc.propagator import (
    advanced,
    build_dalembert,
    causal_propagator,
    green_identities,
    naturality_check,
    retarded,
    verify_exact_sequence,
)

# ---------------------------------------------------------------------------
# Green identities
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("k", [0, 1])
def test_green_identities_on_cylinder(cyl2, k):
    result = green_identities(build_dalembert(cyl2, k), samples=20, seed=3)
    failed = [key for key, value in result.items() if value is False]
    assert not failed
    assert result["ok"]


def test_green_identities_on_two_cylinders(twocyl):
    assert green_identities(build_dalembert(twocyl, 1), samples=10, seed=1)["ok"]


@pytest.mark.parametrize("k", [0, 1])
def test_exact_sequence_on_cylinder(cyl2, k):
    result = verify_exact_sequence(build_dalembert(cyl2, k))
    assert result["kernel_box_compact"] == 0
    assert result["rank_G"] == result["expected_dim_solutions"]
    assert result["ok"]


def test_retarded_solution_vanishes_before_its_source(cyl2):
    op = build_dalembert(cyl2, 0)
    source = Cochain.indicator(cyl2, Cell(0, (0, 0), (3, 4)))
    u = retarded(op, source)
    assert not u.is_zero()
    assert all(cell.pos[0] >= 3 for cell in u.support)
    v = advanced(op, source)
    assert all(cell.pos[0] <= 3 for cell in v.support)


def test_causal_propagator_is_difference(cyl2):
    op = build_dalembert(cyl2, 0)
    source = Cochain.indicator(cyl2, Cell(0, (0, 0), (3, 2)), 2)
    assert causal_propagator(op, source) == retarded(op, source) - advanced(op, source)


# ---------------------------------------------------------------------------
# Refusals
# ---------------------------------------------------------------------------


def test_source_on_first_slice_violates_margin(cyl2):
    op = build_dalembert(cyl2, 0)
    with pytest.raises(MarginViolation):
        retarded(op, Cochain.indicator(cyl2, Cell(0, (0, 0), (0, 1))))


def test_last_slice_violates_advanced_margin(cyl2):
    op = build_dalembert(cyl2, 0)
    with pytest.raises(MarginViolation):
        advanced(op, Cochain.indicator(cyl2, Cell(0, (0, 0), (cyl2.n_time, 1))))


def test_second_slice_lies_inside_a_two_slice_margin(cyl2):
    op = build_dalembert(cyl2, 0)
    with pytest.raises(MarginViolation) as info:
        retarded(op, Cochain.indicator(cyl2, Cell(0, (0, 0), (1, 1))))
    assert info.value.context["slice"] == 1
    with pytest.raises(MarginViolation):
        advanced(op, Cochain.indicator(cyl2, Cell(0, (0, 0), (cyl2.n_time - 1, 1))))


def test_second_slice_is_allowed_under_a_one_slice_margin(small_cylinder):
    op = build_dalembert(small_cylinder, 0)
    u = retarded(op, Cochain.indicator(small_cylinder, Cell(0, (0, 0), (1, 1))))
    assert not u.is_zero()


def test_shadow_reaching_the_spatial_boundary_is_refused(mink2):
    op = build_dalembert(mink2, 0)
    near_edge = Cochain.indicator(mink2, Cell(0, (0, 0), (2, 1)))
    with pytest.raises(ShadowOverflow):
        retarded(op, near_edge)
    with pytest.raises(ShadowOverflow):
        advanced(op, near_edge)
    assert not retarded(op, Cochain.indicator(mink2, Cell(0, (0, 0), (2, 12)))).is_zero()


@pytest.mark.parametrize("k", [-1, 3])
def test_degree_outside_the_complex_is_refused(cyl2, k):
    with pytest.raises(BadDegree):
        build_dalembert(cyl2, k)


def test_single_time_cell_is_not_hyperbolic():
    c = build_complex({"time": {"cells": 1}, "margin": 1,
                       "components": [{"axes": [{"kind": "circle", "cells": 4}]}]})
    with pytest.raises(NonHyperbolic):
        build_dalembert(c, 0)


# ---------------------------------------------------------------------------
# Naturality
# ---------------------------------------------------------------------------


def test_propagator_commutes_with_time_window():
    """G on the window equals G on the full cylinder restricted to the window."""
    e = embedding_preset("CYL2-WINDOW->CYL2")
    source = Cochain.indicator(e.source, Cell(0, (0, 0), (2, 5)))
    assert naturality_check(e, 0, source)["natural"]
