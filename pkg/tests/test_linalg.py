"""Tests for exact sparse linear algebra and integer lattices."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gaugeloc import linalg
from gaugeloc.errors import NotASubspace, NotInSpan

small_ints = st.integers(min_value=-3, max_value=3)


@st.composite
def int_matrices(draw, max_rows=4, max_cols=4):
    rows = draw(st.integers(min_value=1, max_value=max_rows))
    cols = draw(st.integers(min_value=1, max_value=max_cols))
    return [[draw(small_ints) for _ in range(cols)] for _ in range(rows)]


# ---------------------------------------------------------------------------
# Echelon forms, kernels, images
# ---------------------------------------------------------------------------


@settings(max_examples=60, deadline=None)
@given(int_matrices())
def test_rank_nullity(rows):
    """rank + dim ker equals the number of columns."""
    m = linalg.from_rows(rows)
    assert linalg.rank(m) + linalg.kernel_basis(m).dim == m.shape[1]


@settings(max_examples=60, deadline=None)
@given(int_matrices())
def test_kernel_vectors_are_annihilated(rows):
    """Every kernel basis vector is mapped to zero."""
    m = linalg.from_rows(rows)
    kernel = linalg.kernel_basis(m)
    if kernel.dim:
        assert linalg.is_zero(linalg.matmul(m, kernel.basis))


@settings(max_examples=60, deadline=None)
@given(int_matrices())
def test_rref_is_idempotent(rows):
    """Reducing an RREF again changes nothing."""
    r, pivots, reduced = linalg.rref(linalg.from_rows(rows))
    if r:
        again = linalg.rref(reduced)
        assert again[1] == pivots
        assert linalg.equal(again[2], reduced)


@settings(max_examples=60, deadline=None)
@given(int_matrices(), st.lists(small_ints, min_size=4, max_size=4))
def test_solve_consistent_system(rows, x):
    """solve returns an exact solution whenever the right-hand side is in the image."""
    m = linalg.from_rows(rows)
    b = linalg.matmul(m, linalg.column(x[:m.shape[1]]))
    assert linalg.equal(linalg.matmul(m, linalg.solve(m, b)), b)


def test_solve_inconsistent_raises():
    """A right-hand side outside the column span raises NotInSpan."""
    m = linalg.from_rows([[1, 0], [0, 0]])
    with pytest.raises(NotInSpan):
        linalg.solve(m, linalg.column([0, 1]))


def test_intersection_of_coordinate_planes():
    """span(e0, e1) ∩ span(e1, e2) is the line through e1."""
    u = linalg.span(linalg.from_rows([[1, 0], [0, 1], [0, 0]]))
    w = linalg.span(linalg.from_rows([[0, 0], [1, 0], [0, 1]]))
    both = linalg.intersect(u, w)
    assert both.dim == 1
    assert both.contains(linalg.column([0, 5, 0]))
    assert not both.contains(linalg.column([1, 0, 0]))


def test_subspace_sum_dimension():
    """Dimension of a sum of subspaces counts shared directions once."""
    u = linalg.span(linalg.from_rows([[1], [1], [0]]))
    w = linalg.span(linalg.from_rows([[1, 0], [1, 0], [0, 1]]))
    assert linalg.subspace_sum(u, w).dim == 2


def test_coordinates_reject_outside_vector():
    """Subspace.coordinates names the offending column."""
    line = linalg.span(linalg.column([1, 2]))
    with pytest.raises(NotInSpan) as exc:
        line.coordinates(linalg.from_rows([[2, 1], [4, 1]]))
    assert exc.value.context["column"] == 1


# ---------------------------------------------------------------------------
# Quotients
# ---------------------------------------------------------------------------


def test_quotient_kills_subspace():
    """The quotient map sends the subspace to zero and has the expected dimension."""
    big = linalg.span(linalg.identity(3))
    sub = linalg.span(linalg.column([1, 1, 0]))
    q = linalg.quotient_coordinates(sub, big)
    assert q.dim == 2
    assert linalg.is_zero(q(sub.basis))
    assert linalg.rank(q(q.representatives)) == 2


def test_quotient_requires_containment():
    """A subspace not inside the big space is refused."""
    big = linalg.span(linalg.column([1, 0]))
    sub = linalg.span(linalg.column([0, 1]))
    with pytest.raises(NotASubspace):
        linalg.quotient_coordinates(sub, big)


# ---------------------------------------------------------------------------
# Smith normal form and lattices
# ---------------------------------------------------------------------------


@settings(max_examples=40, deadline=None)
@given(int_matrices(max_rows=3, max_cols=3))
def test_smith_certificate(rows):
    """U·m·V = D with a divisibility chain on the diagonal."""
    m = linalg.from_rows(rows)
    u, d, v = linalg.smith_normal_form(m)
    assert linalg.equal(linalg.matmul(linalg.matmul(u, m.convert_to(u.domain)), v), d)
    divisors = linalg.elementary_divisors(m)
    assert all(b % a == 0 for a, b in zip(divisors, divisors[1:]))
    assert len(divisors) == linalg.rank(m)


def test_elementary_divisors_of_diagonal():
    """diag(2, 4) has elementary divisors 2 and 4; diag(2, 3) has 1 and 6."""
    assert linalg.elementary_divisors(linalg.from_rows([[2, 0], [0, 4]])) == [2, 4]
    assert linalg.elementary_divisors(linalg.from_rows([[2, 0], [0, 3]])) == [1, 6]


@settings(max_examples=40, deadline=None)
@given(st.integers(-3, 3), st.integers(-3, 3), st.integers(1, 3), st.integers(0, 1))
def test_lattice_membership_matches_brute_force(x, y, denominator, axis):
    """Membership in the lattice spanned by (2, 1), (0, 3) agrees with solving the 2x2 system."""
    lattice = linalg.IntegerLattice.from_basis(linalg.from_rows([[2, 0], [1, 3]]))
    coords = [Fraction(x), Fraction(y)]
    coords[axis] /= denominator
    v = linalg.matmul(lattice.basis.convert_to(linalg.QQ), linalg.column(coords))
    result = linalg.lattice_membership(lattice, v)
    assert result.coordinates == tuple(coords)
    assert result.member == all(c.denominator == 1 for c in coords)


def test_lattice_membership_outside_span():
    """A vector outside the rational span raises NotInSpan."""
    lattice = linalg.IntegerLattice.from_basis(linalg.from_rows([[1], [1]]))
    with pytest.raises(NotInSpan):
        linalg.lattice_membership(lattice, linalg.column([1, 0]))


def test_dual_basis_pairs_to_identity():
    """Bᵀ·dual = identity for a full-rank lattice basis."""
    lattice = linalg.IntegerLattice.from_basis(linalg.from_rows([[2, 0], [1, 3]]))
    dual = lattice.dual_basis()
    assert linalg.equal(linalg.matmul(lattice.basis.convert_to(linalg.QQ).transpose(), dual), linalg.identity(2))


def test_lcm_denominator():
    """The least common denominator of 1/2, 2/3 and 5 is 6."""
    assert linalg.lcm_denominator([Fraction(1, 2), Fraction(2, 3), 5]) == 6
