"""Tests for Maxwell observables, their radicals and the locality audits."""

from fractions import Fraction

import pytest

from gaugeloc import linalg, maxwell
from gaugeloc.complex import Cell, Cochain, Embedding, build_complex
from gaugeloc.errors import BadDegree, BadSpec, ComplexMismatch, ShadowsIntersect, WindowTooThin
from gaugeloc.presets import complex_preset, embedding_preset

# ---------------------------------------------------------------------------
# Observables and radicals
# ---------------------------------------------------------------------------


def test_cylinder_has_no_radical(cyl2):
    """A compact Cauchy surface has no electric flux classes."""
    result = maxwell.radical(maxwell.observables(cyl2, 1))
    assert result["radical_dim"] == 0
    assert result["ok"]


def test_strip_flux_spans_radical(twostrip):
    """Each strip carries one electric flux observable."""
    obs = maxwell.observables(twostrip, 1)
    result = maxwell.radical(obs)
    assert result["radical_dim"] == 2
    assert result["spans_agree"]
    assert obs.tau_vanishes_on_van


@pytest.mark.parametrize("k", [0, 2])
def test_degree_outside_range_is_refused(cyl2, k):
    with pytest.raises(BadDegree):
        maxwell.observables(cyl2, k)


def test_presymplectic_form_is_antisymmetric(cyl2):
    gram = maxwell.observables(cyl2, 1).gram
    assert linalg.is_zero(linalg.add(gram, gram.transpose()))


def test_solution_space_matches_observables(cyl2):
    report = maxwell.solution_space(cyl2, 1).report
    assert report["on_shell"]
    assert report["van_annihilates_solutions"]
    assert report["ok"]


@pytest.mark.slow
def test_annulus_radical(ann3):
    """The flux through the hole is the single radical direction."""
    result = maxwell.radical(maxwell.observables(ann3, 1))
    assert result["radical_dim"] == 1
    assert result["ok"]


# ---------------------------------------------------------------------------
# Gauge fixing and evaluation
# ---------------------------------------------------------------------------


def test_lorenz_gauge_fixing(cyl2):
    field = Cochain(cyl2, 1, {Cell(0, (0, 1), (3, 2)): 1, Cell(0, (1, 0), (2, 5)): -2})
    fixed = maxwell.lorenz_gauge(cyl2, field)
    assert fixed["lorenz"]
    assert (fixed["field"] - field).d().is_zero()


def test_observable_reading_is_gauge_invariant(cyl2):
    obs = maxwell.observables(cyl2, 1)
    omega = obs.cochain([1] + [0] * (obs.dim - 1))
    field = Cochain(cyl2, 1, {Cell(0, (0, 1), (3, 2)): 3})
    chi = Cochain(cyl2, 0, {Cell(0, (0, 0), (3, 2)): 1, Cell(0, (0, 0), (2, 7)): -4})
    assert maxwell.evaluate(omega, field) == maxwell.evaluate(omega, field + chi.d())


# ---------------------------------------------------------------------------
# Locality
# ---------------------------------------------------------------------------


def test_kernel_along_the_line(strips_to_line):
    """The two strip fluxes merge along MINK2, so one combination dies."""
    result = maxwell.locality_kernel(strips_to_line, 1)
    assert result["kernel_dim"] == result["cohomology_kernel_dim"] == 1
    assert result["kernel_in_radical"]
    assert result["component_integrals"] == [(Fraction(-1), Fraction(1))]


def test_no_kernel_into_two_cylinders(strips_to_cyls):
    result = maxwell.locality_kernel(strips_to_cyls, 1)
    assert result["kernel_dim"] == 0
    assert result["ok"]


def test_no_go_witness(strips_to_cyls, strips_to_line):
    result = maxwell.no_go_witness(strips_to_cyls, strips_to_line, 1)
    assert result["found"]
    assert result["witness_in_radical"]
    assert result["pairing"] != 0


def test_no_go_needs_common_source(strips_to_cyls):
    with pytest.raises(ComplexMismatch):
        maxwell.no_go_witness(strips_to_cyls, embedding_preset("STRIP->MINK2@2"), 1)


@pytest.mark.slow
def test_filling_the_hole_kills_the_flux():
    result = maxwell.locality_kernel(embedding_preset("ANN3->PLANE3"), 1)
    assert result["kernel_dim"] == 1
    assert result["ok"]


# ---------------------------------------------------------------------------
# Causality and time slices
# ---------------------------------------------------------------------------


def test_causally_disjoint_strips_commute():
    result = maxwell.causality_check(embedding_preset("STRIP->MINK2@2"), embedding_preset("STRIP->MINK2@18"), 1)
    assert result["zero_block"]


def test_overlapping_regions_are_refused():
    left = embedding_preset("STRIP->MINK2@2")
    with pytest.raises(ShadowsIntersect):
        maxwell.causality_check(left, left, 1)


def test_time_window_is_bijective():
    result = maxwell.timeslice_check(embedding_preset("CYL2-WINDOW->CYL2"), 1)
    assert result["bijective"]


def test_thin_window_is_refused(cyl2):
    thin = build_complex({"time": {"cells": 3}, "margin": 2,
                          "components": [{"axes": [{"kind": "circle", "cells": 8}]}]})
    e = Embedding.translate(thin, cyl2, [(0, (1, 0))], name="thin")
    with pytest.raises(WindowTooThin):
        maxwell.timeslice_check(e, 1)


def test_spatial_embedding_is_not_a_window(strips_to_cyls):
    with pytest.raises(BadSpec):
        maxwell.timeslice_check(strips_to_cyls, 1)


def test_isotony_quotient_is_injective(strips_to_line):
    result = maxwell.isotony_quotient([strips_to_line], 1)
    assert result["regions"][0]["kernel_dim"] == 1
    assert result["ok"]


def test_isotony_requires_one_target(strips_to_line, strips_to_cyls):
    with pytest.raises(ComplexMismatch):
        maxwell.isotony_quotient([strips_to_line, strips_to_cyls], 1)


def test_preset_complexes_are_shared():
    assert complex_preset("CYL2") is complex_preset("CYL2")
