"""Tests for support-restricted cohomology, the time homotopies and the dualities."""

from fractions import Fraction

import pytest

from gaugeloc import linalg
from gaugeloc.cohomology import (
    check_profile,
    cohomology,
    dims,
    duality_pairing_matrix,
    homotopy_identities,
    induced_map,
    integer_h1,
    kunneth_prediction,
    one_sided_triviality,
    raw_dimension,
    toolkit_isomorphisms,
)
from gaugeloc.complex import C, FC, FREE, PC, SC, SUPPORTS, TC, Cochain, Flag, SupportSystem
from gaugeloc.errors import BadProfile, BadSpec
from gaugeloc.presets import complex_names, complex_preset

# ---------------------------------------------------------------------------
# Dimension tables
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("s, expected", [
    (FREE, (1, 1, 0)),
    (C, (0, 1, 1)),
    (TC, (0, 1, 1)),
    (SC, (1, 1, 0)),
    (PC, (0, 0, 0)),
    (FC, (0, 0, 0)),
])
def test_cylinder_dimensions(cyl2, s, expected):
    assert dims(cyl2, s) == expected


@pytest.mark.parametrize("name", ["c", "tc", "sc", "free"])
def test_reduced_and_raw_dimensions_agree(cyl2, name):
    """The quotient construction agrees with the rank count and the product formula."""
    s = SupportSystem.parse(name)
    for k in range(cyl2.dim + 1):
        assert cohomology(cyl2, k, s).dim == raw_dimension(cyl2, k, s) == kunneth_prediction(cyl2, k, s)


def test_two_cylinders_double_the_classes(twocyl):
    assert dims(twocyl, FREE) == (2, 2, 0)
    assert dims(twocyl, C) == (0, 2, 2)


def test_unknown_flavor_is_refused(cyl2):
    with pytest.raises(BadSpec):
        cohomology(cyl2, 1, FREE, "curl")


@pytest.mark.slow
def test_annulus_dimensions(ann3):
    """The hole gives the compactly supported cohomology a class in degree 2."""
    assert dims(ann3, FREE) == (1, 1, 0, 0)
    assert dims(ann3, C) == (0, 0, 1, 1)


@pytest.mark.slow
@pytest.mark.parametrize("name", complex_names())
def test_every_preset_matches_the_product_formula(name):
    c = complex_preset(name)
    for s in SUPPORTS.values():
        for k in range(c.dim + 1):
            assert cohomology(c, k, s).dim == raw_dimension(c, k, s) == kunneth_prediction(c, k, s), (s.name, k)


@pytest.mark.slow
def test_annulus_spatial_factor(ann3):
    """The holed factor that the product formula measures directly."""
    compact = SupportSystem(Flag.FREE, Flag.COMPACT)
    assert [raw_dimension(ann3.space, j) for j in range(3)] == [1, 1, 0]
    assert [raw_dimension(ann3.space, j, compact) for j in range(3)] == [0, 1, 1]


# ---------------------------------------------------------------------------
# Classes
# ---------------------------------------------------------------------------


def test_exact_cochains_have_zero_class(cyl2):
    h1 = cohomology(cyl2, 1, FREE)
    f = Cochain(cyl2, 0, {cell: i % 5 for i, cell in enumerate(cyl2.cells[0])})
    assert h1.is_exact(f.d())


def test_integer_generator_is_not_in_even_lattice(cyl2):
    """The winding generator has coordinate 1; only its even multiples lie in 2ℤ (units of π)."""
    lattice = integer_h1(cyl2)
    assert lattice.rank == 1
    gen = lattice.generators[0]
    assert lattice.class_coordinates(gen) == (Fraction(1),)
    assert not lattice.membership(gen).member
    assert lattice.membership(2 * gen).member
    assert not cohomology(cyl2, 1, FREE).is_exact(gen)


def test_induced_map_on_top_classes(strips_to_cyls, strips_to_line):
    """Both strip classes survive in two circles but merge in one line."""
    into_circles = induced_map(strips_to_cyls, 2, C)
    into_line = induced_map(strips_to_line, 2, C)
    assert into_circles.shape == (2, 2)
    assert linalg.rank(into_circles) == 2
    assert into_line.shape == (1, 2)
    assert linalg.kernel_basis(into_line).dim == 1


# ---------------------------------------------------------------------------
# Homotopies and one-sided supports
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("k", [0, 1, 2])
def test_homotopy_identities_hold(cyl2, k):
    result = homotopy_identities(cyl2, k)
    assert result["tc_homotopy"]
    assert result["sc_homotopy"]


@pytest.mark.parametrize("k", [1, 2])
def test_toolkit_maps_are_mutually_inverse(cyl2, k):
    result = toolkit_isomorphisms(cyl2, k)
    assert result["tc_inverse"]
    assert result["sc_inverse"]


@pytest.mark.parametrize("k", [0, 1, 2])
def test_one_sided_supports_have_no_cohomology(cyl2, k):
    assert one_sided_triviality(cyl2, k)["ok"]


def test_profile_must_stay_inside(cyl2):
    with pytest.raises(BadProfile):
        check_profile(cyl2, {0: 1})


def test_profile_must_have_unit_mass(cyl2):
    with pytest.raises(BadProfile):
        check_profile(cyl2, {2: Fraction(1, 2)})


# ---------------------------------------------------------------------------
# Dualities
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("pair", ["c-free", "free-c", "sc-tc", "tc-sc"])
def test_wedge_duality_is_nondegenerate(cyl2, pair):
    for k in range(cyl2.dim + 1):
        m = duality_pairing_matrix(cyl2, k, pair)
        assert m.shape[0] == m.shape[1] == linalg.rank(m)


def test_duality_rejects_unknown_pair(cyl2):
    with pytest.raises(BadSpec):
        duality_pairing_matrix(cyl2, 1, "c-c")


def test_metric_duality_between_flavors(cyl2):
    """H_{c,δ} pairs nondegenerately with H_free through the metric pairing."""
    for k in range(cyl2.dim + 1):
        m = duality_pairing_matrix(cyl2, k, "c-free", ("delta", "d"))
        assert m.shape[0] == m.shape[1] == linalg.rank(m)


def test_duality_refuses_d_against_delta(cyl2):
    with pytest.raises(BadSpec):
        duality_pairing_matrix(cyl2, 1, "c-free", ("d", "delta"))
