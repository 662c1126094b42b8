"""Tests for exact phases and the Weyl algebra of presymplectic groups."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gaugeloc import linalg
from gaugeloc.ccr import (
    Cyclotomic,
    PresymplecticGroup,
    PresymplecticMorphism,
    WeylElement,
    ccr_morphism,
    center_test,
    coefficient_square_sum,
    commutator,
    involution,
    l1_norm,
    reference_state,
    separates_labels,
    state_bound_check,
)
from gaugeloc.errors import BadSpec, GroupMismatch, NotPresymplectic

HALF = Fraction(1, 2)
THIRD = Fraction(1, 3)


@pytest.fixture()
def plane():
    """Two generators pairing to π."""
    return PresymplecticGroup(("a", "b"), ((0, 1), (-1, 0)))


# ---------------------------------------------------------------------------
# Cyclotomic arithmetic
# ---------------------------------------------------------------------------


def test_half_turn_is_minus_one():
    assert Cyclotomic.phase(1) == -1
    assert Cyclotomic.phase(HALF) * Cyclotomic.phase(HALF) == -1


def test_cube_roots_of_unity_sum_to_zero():
    total = Cyclotomic.phase(0) + Cyclotomic.phase(Fraction(2, 3)) + Cyclotomic.phase(Fraction(4, 3))
    assert total.is_zero()


def test_distinct_phases_differ():
    assert Cyclotomic.phase(THIRD) != Cyclotomic.phase(Fraction(2, 3))
    assert not Cyclotomic.phase(THIRD).is_zero()


@settings(max_examples=50, deadline=None)
@given(st.fractions(min_value=-3, max_value=3, max_denominator=6), st.integers(1, 5))
def test_phase_times_conjugate_is_modulus_squared(r, q):
    c = Cyclotomic.phase(r, q)
    assert c * c.conjugate() == q * q
    assert abs(c) == q


# ---------------------------------------------------------------------------
# Weyl relations
# ---------------------------------------------------------------------------


def test_weyl_relation(plane):
    product = plane.W((1, 0)) * plane.W((0, 1))
    assert product.coefficient((1, 1)) == Cyclotomic.phase(-HALF)
    assert product == (-1) * (plane.W((0, 1)) * plane.W((1, 0)))


def test_involution_inverts_generators(plane):
    w = plane.W((2, -1))
    assert involution(w) * w == plane.unit()


@settings(max_examples=30, deadline=None)
@given(*(st.tuples(st.integers(-2, 2), st.integers(-2, 2)) for _ in range(3)))
def test_product_is_associative(h, k, m):
    g = PresymplecticGroup(("a", "b"), ((0, THIRD), (-THIRD, 0)))
    x, y, z = g.W(h), g.W(k) + g.W(m), g.W(m)
    assert (x * y) * z == x * (y * z)
    assert involution(x * y) == involution(y) * involution(x)


def test_reference_state_is_positive(plane):
    x = plane.W((1, 0)) + WeylElement(plane, {(Fraction(0), Fraction(1)): Cyclotomic.phase(THIRD)})
    assert reference_state(involution(x) * x) == coefficient_square_sum(x) == 2
    assert reference_state(plane.unit()) == 1
    assert l1_norm(x) == 2
    assert state_bound_check(x)


def test_mixing_groups_is_refused(plane):
    other = PresymplecticGroup(("a", "b"), ((0, 1), (-1, 0)))
    with pytest.raises(GroupMismatch):
        plane.W((1, 0)) + other.W((1, 0))


# ---------------------------------------------------------------------------
# Groups and morphisms
# ---------------------------------------------------------------------------


def test_pairing_must_be_antisymmetric():
    with pytest.raises(NotPresymplectic):
        PresymplecticGroup(("a", "b"), ((0, 1), (1, 0)))


def test_rational_coordinate_needs_divisible_generator(plane):
    with pytest.raises(GroupMismatch):
        plane.element((HALF, 0))
    divisible = PresymplecticGroup(("a", "b"), ((0, 1), (-1, 0)), (True, False))
    assert divisible.element((HALF, 0)) == (HALF, Fraction(0))


def test_morphism_must_preserve_pairing(plane):
    with pytest.raises(NotPresymplectic):
        PresymplecticMorphism(plane, plane, linalg.from_rows([[2, 0], [0, 1]]))


def test_morphism_shape_is_checked(plane):
    with pytest.raises(BadSpec):
        PresymplecticMorphism(plane, plane, linalg.identity(3))


def test_collapsing_morphism_kills_an_element():
    """Δ(L)(1 - W_x) = 0 when L sends x to zero."""
    source = PresymplecticGroup(("x",), ((0,),))
    target = PresymplecticGroup(("y",), ((0,),))
    collapse = PresymplecticMorphism(source, target, linalg.zeros(1, 1))
    a = source.unit() - source.W((1,))
    assert not a.is_zero()
    assert ccr_morphism(collapse, a).is_zero()
    assert not separates_labels(collapse, [(0,), (1,)])


def test_identity_composes(plane):
    ident = PresymplecticMorphism.identity(plane)
    assert linalg.equal(ident.compose(ident).matrix, linalg.identity(2))


# ---------------------------------------------------------------------------
# Centre
# ---------------------------------------------------------------------------


def test_even_pairings_are_central():
    g = PresymplecticGroup(("a", "b"), ((0, 2), (-2, 0)))
    assert center_test(g, (1, 0))["central"]


def test_odd_pairing_is_not_central(plane):
    result = center_test(plane, (1, 0))
    assert not result["central"]
    assert result["witness"] == "b"
    assert not result["commutator_zero"]


def test_divisible_generator_breaks_even_pairing():
    """Against a divisible generator only a vanishing pairing is central."""
    g = PresymplecticGroup(("a", "d"), ((0, 2), (-2, 0)), (False, True))
    result = center_test(g, (1, 0))
    assert not result["central"]
    assert result["witness_element"] == (Fraction(0), HALF)
    assert result["pairing_pi"] == 1
    assert not commutator(g.W((1, 0)), g.W(result["witness_element"])).is_zero()
