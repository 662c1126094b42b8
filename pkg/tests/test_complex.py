"""Tests for cubical complexes, cochains, supports and embeddings."""

from concurrent.futures import ThreadPoolExecutor

import pytest

from gaugeloc import linalg
from gaugeloc.complex import (
    C,
    FC,
    FREE,
    PC,
    SC,
    TC,
    Cell,
    Cochain,
    Embedding,
    SupportSystem,
    build_complex,
    metric_pairing,
    pullback,
    pushforward,
    wedge_pairing,
)
from gaugeloc.errors import BadSpec, ComplexMismatch, DegreeMismatch, SupportLeak
from gaugeloc.presets import complex_preset, embedding_preset

# ---------------------------------------------------------------------------
# Construction
# ---------------------------------------------------------------------------


def test_cylinder_cell_counts(cyl2):
    """Time interval of 6 cells times a circle of 8 cells."""
    assert cyl2.dim == 2
    assert [len(cs) for cs in cyl2.cells] == [56, 104, 48]


def test_missing_time_axis_is_bad_spec():
    with pytest.raises(BadSpec):
        build_complex({"components": [{"axes": [{"kind": "circle", "cells": 4}]}]})


def test_margin_too_large_is_bad_spec():
    """Two margins of 3 slices do not fit 4 time cells."""
    with pytest.raises(BadSpec):
        build_complex({"time": {"cells": 4}, "margin": 3,
                       "components": [{"axes": [{"kind": "circle", "cells": 4}]}]})


def test_short_circle_is_bad_spec():
    with pytest.raises(BadSpec):
        build_complex({"time": {"cells": 4}, "components": [{"axes": [{"kind": "circle", "cells": 2}]}]})


def test_disconnecting_deletion_is_bad_spec():
    """Removing the middle cell of an interval splits the component."""
    with pytest.raises(BadSpec):
        build_complex({"time": {"cells": 4},
                       "components": [{"axes": [{"kind": "interval", "cells": 3}], "deleted": [[1]]}]})


def test_euler_characteristic_of_cylinder(cyl2):
    assert cyl2.euler_characteristic(FREE) == 0


# ---------------------------------------------------------------------------
# Operators
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("s", [FREE, C, TC, SC, PC, FC])
def test_d_squares_to_zero(cyl2, s):
    """d∘d = 0 on every support system."""
    assert linalg.is_zero(linalg.matmul(cyl2.coboundary_matrix(1, s), cyl2.coboundary_matrix(0, s)))


def test_delta_is_metric_adjoint_of_d(small_cylinder):
    """(dα, β) = (α, δβ) for unrestricted cochains."""
    c = small_cylinder
    alpha = Cochain(c, 0, {cell: i + 1 for i, cell in enumerate(c.cells[0][:7])})
    beta = Cochain(c, 1, {cell: (-1) ** i * (i + 2) for i, cell in enumerate(c.cells[1][3:14])})
    assert metric_pairing(alpha.d(), beta) == metric_pairing(alpha, beta.delta())


def test_time_edges_carry_negative_weight(small_cylinder):
    c = small_cylinder
    time_edge = next(cell for cell in c.cells[1] if cell.dims[0])
    space_edge = next(cell for cell in c.cells[1] if not cell.dims[0])
    assert c.weight(time_edge) < 0 < c.weight(space_edge)


def test_wedge_pairing_with_constant_function(small_cylinder):
    """⟨1, θ⟩ sums a top cochain over the complex."""
    c = small_cylinder
    tops = c.top_cells()
    theta = Cochain(c, 2, {tops[0]: 3, tops[5]: -1})
    assert wedge_pairing(Cochain.constant(c, 0), theta) == 2


def test_wedge_pairing_degree_check(small_cylinder):
    with pytest.raises(DegreeMismatch):
        wedge_pairing(Cochain.zero(small_cylinder, 1), Cochain.zero(small_cylinder, 2))


def test_operators_built_from_many_threads_are_shared(small_cylinder):
    c = small_cylinder

    def build(_):
        return c.basis(1, TC), c.coboundary_matrix(1, TC), c.gram_inverse(2), c.dalembert_matrix(1)

    with ThreadPoolExecutor(max_workers=4) as executor:
        results = list(executor.map(build, range(8)))
    for result in results[1:]:
        assert all(a is b for a, b in zip(result, results[0]))
    assert build(None)[1] is results[0][1]


# ---------------------------------------------------------------------------
# Cochains and supports
# ---------------------------------------------------------------------------


def test_cochain_rejects_cell_of_wrong_degree(cyl2):
    with pytest.raises(DegreeMismatch):
        Cochain(cyl2, 1, {cyl2.cells[0][0]: 1})


def test_cochains_on_different_complexes_do_not_mix(cyl2, small_cylinder):
    with pytest.raises(ComplexMismatch):
        Cochain.zero(cyl2, 1) + Cochain.zero(small_cylinder, 1)


def test_support_bases_are_nested(cyl2):
    """C ⊆ TC ⊆ FREE and C ⊆ SC ⊆ FREE on every degree."""
    for k in range(cyl2.dim + 1):
        c, tc, sc, free = (set(cyl2.basis(k, s)) for s in (C, TC, SC, FREE))
        assert c <= tc <= free
        assert c <= sc <= free


def test_constant_function_is_not_compact(cyl2):
    one = Cochain.constant(cyl2, 0)
    assert one.satisfies(FREE)
    assert one.satisfies(SC)
    assert not one.satisfies(TC)


def test_vector_refuses_leaking_cochain(cyl2):
    with pytest.raises(SupportLeak):
        cyl2.vector(Cochain.constant(cyl2, 0), C)


def test_support_names_and_duals():
    assert SupportSystem.parse("TC") is TC
    assert C.dual() == FREE
    assert PC.dual() == FC
    assert TC.dual() == SC
    with pytest.raises(BadSpec):
        SupportSystem.parse("spacelike")


# ---------------------------------------------------------------------------
# Embeddings
# ---------------------------------------------------------------------------


def test_composed_preset_has_outer_target():
    e = embedding_preset("STRIP->TWOCYL")
    assert e.source is complex_preset("STRIP")
    assert e.target is complex_preset("TWOCYL")


def test_compose_refuses_mismatched_ends():
    strip_in_line = embedding_preset("STRIP->MINK2@2")
    with pytest.raises(ComplexMismatch):
        strip_in_line.compose(embedding_preset("TWOSTRIP->TWOCYL"))


def test_pushforward_then_pullback_is_identity():
    """Extension by zero of an interior cochain pulls back to itself."""
    e = embedding_preset("STRIP->MINK2@2")
    inner_edge = Cell(0, (0, 1), (3, 1))
    omega = Cochain.indicator(e.source, inner_edge, 5)
    pushed = pushforward(e, omega)
    assert pushed.support == {Cell(0, (0, 1), (3, 3))}
    assert pullback(e, pushed) == omega


def test_pushforward_refuses_collar_cells():
    """The strip's end vertex borders an edge of MINK2 outside the image."""
    e = embedding_preset("STRIP->MINK2@2")
    with pytest.raises(SupportLeak):
        pushforward(e, Cochain.indicator(e.source, Cell(0, (0, 0), (3, 0))))


def test_translate_rejects_out_of_range_placement(twostrip, mink2):
    """Placing a strip past the end of MINK2 leaves cells without images."""
    with pytest.raises(BadSpec):
        Embedding.translate(twostrip, mink2, [(0, (0, 2)), (0, (0, 23))])


def test_causal_shadow_contains_its_source(mink2):
    source = [Cell(0, (0, 0), (3, 10))]
    shadow = mink2.causal_shadow(source)
    assert set(source) <= shadow
    assert Cell(0, (0, 0), (5, 12)) in shadow
    assert Cell(0, (0, 0), (4, 12)) not in shadow


def test_future_shadow_skips_the_past(mink2):
    shadow = mink2.causal_shadow([Cell(0, (0, 0), (3, 10))], "future")
    assert all(cell.pos[0] >= 3 for cell in shadow)
