"""Preset complexes, embeddings and scenarios.

Add new complexes to COMPLEXES. Each entry needs:
  - name:        Upper-case preset name used in scenarios (e.g. 'CYL2')
  - description: One line shown by ``gaugeloc list-presets``
  - spec:        Mapping accepted by ``complex.build_complex``

Embeddings in EMBEDDINGS either place the source components in the target
(``placements``: one ``(target_component, offsets)`` pair per source
component, time offset first) or compose two other presets (``compose``:
``[outer, inner]``).

Scenarios in SCENARIOS have the shape of a parsed scenario file plus a
``description`` and the ``anchor`` result they reproduce.
"""

import functools

from gaugeloc.complex import Embedding, SpacetimeComplex, build_complex
from gaugeloc.errors import ValidationError


def _box(*axes, deleted=()):
    return {"axes": [{"kind": kind, "cells": cells} for kind, cells in axes], "deleted": [list(p) for p in deleted]}


_HOLE = [(2, 2), (2, 3), (3, 2), (3, 3)]

COMPLEXES = [
    {
        "name": "CYL2",
        "description": "time x circle of 8 cells; compact Cauchy surface, H¹ = ℤ",
        "spec": {"time": {"cells": 6}, "components": [_box(("circle", 8))]},
    },
    {
        "name": "CYL2-WINDOW",
        "description": "the middle 4 time cells of CYL2",
        "spec": {"time": {"cells": 4}, "components": [_box(("circle", 8))]},
    },
    {
        "name": "PLANE3",
        "description": "time x 6x6 square grid",
        "spec": {"time": {"cells": 6}, "components": [_box(("interval", 6), ("interval", 6))]},
    },
    {
        "name": "ANN3",
        "description": "time x 6x6 grid minus a central 2x2 block; H_c² = ℚ",
        "spec": {"time": {"cells": 6}, "components": [_box(("interval", 6), ("interval", 6), deleted=_HOLE)]},
    },
    {
        "name": "ANN3-WINDOW",
        "description": "the middle 4 time cells of ANN3",
        "spec": {"time": {"cells": 4}, "components": [_box(("interval", 6), ("interval", 6), deleted=_HOLE)]},
    },
    {
        "name": "TOR3",
        "description": "time x torus of 8x8 cells; H¹ = ℤ²",
        "spec": {"time": {"cells": 4}, "components": [_box(("circle", 8), ("circle", 8))]},
    },
    {
        "name": "TWOCYL",
        "description": "time x two disjoint circles of 8 cells",
        "spec": {"time": {"cells": 6}, "components": [_box(("circle", 8)), _box(("circle", 8))]},
    },
    {
        "name": "TWOSTRIP",
        "description": "time x two disjoint intervals of 3 cells",
        "spec": {"time": {"cells": 6}, "components": [_box(("interval", 3)), _box(("interval", 3))]},
    },
    {
        "name": "STRIP",
        "description": "time x one interval of 3 cells",
        "spec": {"time": {"cells": 6}, "components": [_box(("interval", 3))]},
    },
    {
        "name": "MINK2",
        "description": "time x an interval of 24 cells, a stand-in for 2d Minkowski space",
        "spec": {"time": {"cells": 6}, "components": [_box(("interval", 24))]},
    },
]

COMPLEXES_BY_NAME = {c["name"]: c for c in COMPLEXES}

EMBEDDINGS = [
    {
        "name": "ANN3->PLANE3",
        "description": "fill the hole: the electric flux through it dies",
        "source": "ANN3", "target": "PLANE3", "placements": [(0, (0, 0, 0))],
    },
    {
        "name": "TWOSTRIP->MINK2",
        "description": "both strips side by side in one line; their flux classes merge",
        "source": "TWOSTRIP", "target": "MINK2", "placements": [(0, (0, 2)), (0, (0, 18))],
    },
    {
        "name": "TWOSTRIP->TWOCYL",
        "description": "one strip into each circle",
        "source": "TWOSTRIP", "target": "TWOCYL", "placements": [(0, (0, 0)), (1, (0, 0))],
    },
    {
        "name": "CYL2-WINDOW->CYL2",
        "description": "time sub-window of CYL2",
        "source": "CYL2-WINDOW", "target": "CYL2", "placements": [(0, (1, 0))],
    },
    {
        "name": "ANN3-WINDOW->ANN3",
        "description": "time sub-window of ANN3",
        "source": "ANN3-WINDOW", "target": "ANN3", "placements": [(0, (1, 0, 0))],
    },
    {
        "name": "ANN3-WINDOW->PLANE3",
        "description": "time sub-window of ANN3, then fill the hole",
        "compose": ["ANN3->PLANE3", "ANN3-WINDOW->ANN3"],
    },
    {
        "name": "STRIP->MINK2@2",
        "description": "a strip at the left end of MINK2",
        "source": "STRIP", "target": "MINK2", "placements": [(0, (0, 2))],
    },
    {
        "name": "STRIP->MINK2@18",
        "description": "a strip at the right end of MINK2, causally disjoint from the left one",
        "source": "STRIP", "target": "MINK2", "placements": [(0, (0, 18))],
    },
    {
        "name": "STRIP->TWOSTRIP",
        "description": "the first strip of TWOSTRIP",
        "source": "STRIP", "target": "TWOSTRIP", "placements": [(0, (0, 0))],
    },
    {
        "name": "STRIP->TWOCYL",
        "description": "the first strip of TWOSTRIP inside TWOCYL",
        "compose": ["TWOSTRIP->TWOCYL", "STRIP->TWOSTRIP"],
    },
]

EMBEDDINGS_BY_NAME = {e["name"]: e for e in EMBEDDINGS}


def complex_names() -> list[str]:
    return [c["name"] for c in COMPLEXES]


@functools.lru_cache(maxsize=None)
def complex_preset(name: str) -> SpacetimeComplex:
    """The shared instance of a preset complex; its operator caches persist across analyses."""
    try:
        entry = COMPLEXES_BY_NAME[name]
    except KeyError:
        raise ValidationError(f"unknown complex preset {name!r}", preset=name) from None
    return build_complex(entry["spec"])


@functools.lru_cache(maxsize=None)
def embedding_preset(name: str) -> Embedding:
    try:
        entry = EMBEDDINGS_BY_NAME[name]
    except KeyError:
        raise ValidationError(f"unknown embedding preset {name!r}", preset=name) from None
    if "compose" in entry:
        outer, inner = entry["compose"]
        composite = embedding_preset(outer).compose(embedding_preset(inner))
        return Embedding(composite.source, composite.target, composite.cell_map, composite.collar_margin, name)
    return Embedding.translate(complex_preset(entry["source"]), complex_preset(entry["target"]),
                               entry["placements"], name=name)


SCENARIOS = [
    {
        "name": "maxwell-annulus",
        "description": "Maxwell 1-forms on ANN3: radical 1, locality kernel 1 towards PLANE3; CYL2 time-slice window",
        "anchor": "non-injective presymplectic maps from causal embeddings",
        "complexes": {"ann": {"preset": "ANN3"}, "plane": {"preset": "PLANE3"}, "cylw": {"preset": "CYL2-WINDOW"},
                      "cyl": {"preset": "CYL2"}},
        "embeddings": {"fill": {"preset": "ANN3->PLANE3"}, "window": {"preset": "ANN3-WINDOW->PLANE3"},
                       "inner": {"preset": "ANN3-WINDOW->ANN3"}, "slice": {"preset": "CYL2-WINDOW->CYL2"}},
        "analyses": [
            {"kind": "maxwell-audit", "complex": "ann", "k": 1, "embedding": "fill"},
            {"kind": "isotony", "regions": ["window", "fill"], "target": "plane", "layer": "maxwell",
             "inclusions": [["window", "fill", "inner"]]},
            {"kind": "maxwell-audit", "complex": "cylw", "k": 1, "embedding": "slice"},
        ],
    },
    {
        "name": "maxwell-no-go-m2",
        "description": "two strips: killed along MINK2, pairing nontrivially along TWOCYL",
        "anchor": "no quotient of the Maxwell functor restores locality",
        "complexes": {"strips": {"preset": "TWOSTRIP"}, "cyls": {"preset": "TWOCYL"}, "line": {"preset": "MINK2"}},
        "embeddings": {"f": {"preset": "TWOSTRIP->TWOCYL"}, "h": {"preset": "TWOSTRIP->MINK2"},
                       "left": {"preset": "STRIP->MINK2@2"}, "right": {"preset": "STRIP->MINK2@18"}},
        "analyses": [
            {"kind": "maxwell-audit", "complex": "strips", "k": 1, "embedding": "h"},
            {"kind": "maxwell-audit", "complex": "strips", "k": 1, "embedding": "f"},
            {"kind": "maxwell-audit", "complex": "line", "k": 1, "disjoint": ["left", "right"]},
            {"kind": "no-go", "f": "f", "h": "h", "k": 1, "layer": "maxwell"},
        ],
    },
    {
        "name": "ym-aharonov-bohm",
        "description": "CYL2 connections: affine functionals miss the holonomy-π connection; characters see it",
        "anchor": "affine characters separate gauge classes of connections",
        "complexes": {"cyl": {"preset": "CYL2"}},
        "embeddings": {},
        "analyses": [
            {"kind": "ym-affine-audit", "complex": "cyl"},
            {"kind": "ym-character-audit", "complex": "cyl"},
        ],
    },
    {
        "name": "ym-character-no-go",
        "description": "character observables of TWOSTRIP: kernel along MINK2, odd-π partner pairing along TWOCYL",
        "anchor": "no quotient of the character functor restores locality",
        "complexes": {"strips": {"preset": "TWOSTRIP"}, "cyls": {"preset": "TWOCYL"}, "line": {"preset": "MINK2"}},
        "embeddings": {"f": {"preset": "TWOSTRIP->TWOCYL"}, "h": {"preset": "TWOSTRIP->MINK2"}},
        "analyses": [
            {"kind": "ym-affine-audit", "complex": "strips", "embeddings": ["f", "h"]},
            {"kind": "no-go", "f": "f", "h": "h", "k": 1, "layer": "character"},
            {"kind": "isotony", "regions": ["h"], "target": "line", "layer": "character"},
        ],
    },
    {
        "name": "cohomology-toolkit",
        "description": "cohomology tables, dualities and the time homotopies on CYL2 and ANN3",
        "anchor": "cohomology with restricted supports on globally hyperbolic spacetimes",
        "complexes": {"cyl": {"preset": "CYL2"}, "ann": {"preset": "ANN3"}, "cyls": {"preset": "TWOCYL"}},
        "embeddings": {},
        "analyses": [
            {"kind": "cohomology-table", "complex": "cyl"},
            {"kind": "duality-check", "complex": "cyl"},
            {"kind": "homotopy-check", "complex": "cyl"},
            {"kind": "cohomology-table", "complex": "ann"},
            {"kind": "homotopy-check", "complex": "ann"},
            {"kind": "propagator-check", "complex": "cyl", "k": 0, "samples": 50},
            {"kind": "propagator-check", "complex": "cyl", "k": 1, "samples": 50},
            {"kind": "propagator-check", "complex": "cyls", "k": 1, "samples": 50},
        ],
    },
    {
        "name": "ccr-smoke",
        "description": "Weyl algebra of the CYL2 character group: relations, state, centre",
        "anchor": "CCR quantization of presymplectic Abelian groups",
        "complexes": {"cyl": {"preset": "CYL2"}},
        "embeddings": {},
        "analyses": [
            {"kind": "ccr-quantize", "complex": "cyl"},
        ],
    },
]

SCENARIOS_BY_NAME = {s["name"]: s for s in SCENARIOS}


def list_presets() -> list[dict]:
    """Static catalog: scenario name, description and the result it reproduces."""
    return [{"name": s["name"], "description": s["description"], "anchor": s["anchor"]} for s in SCENARIOS]
