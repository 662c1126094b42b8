"""Exact retarded and advanced Green operators of □ = δd + dδ by slice-by-slice substitution.

The time window is treated as a chunk of an ideal infinite spacetime. A
retarded solve starts from zero data on the two earliest vertex slices and
the earliest edge slice and fixes slice t+1 from the rows of slice t; the
advanced solve is its mirror image. Rows near the far end of the window are
never imposed, so every identity below names the rows on which it holds.
Applied to a cochain, G⁺ refuses sources inside the early time margin and
G⁻ those inside the late one, and both refuse sources whose shadow in the
solve direction meets the spatial boundary.
"""

import logging
import random
from dataclasses import dataclass
from fractions import Fraction

from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.exceptions import DMNonInvertibleMatrixError

from gaugeloc import linalg
from gaugeloc.complex import C, Cochain, Embedding, SpacetimeComplex, pullback, pushforward
from gaugeloc.errors import BadDegree, BadSpec, ComplexMismatch, MarginViolation, NonHyperbolic, ShadowOverflow

logger = logging.getLogger(__name__)

RETARDED = "retarded"
ADVANCED = "advanced"

VERTEX, EDGE = 0, 1


@dataclass(frozen=True)
class _Step:
    rows: tuple[int, ...]
    unknown_parts: tuple[tuple[int, int], ...]
    couplings: tuple[tuple[tuple[int, int], DomainMatrix], ...]
    inverse: DomainMatrix


class GreenOperator:
    """G⁺ or G⁻ for one □, stored as the per-slice recursion coefficients."""

    def __init__(self, op: "DAlembertOperator", flavor: str, reverse_slices: bool = False):
        self.op = op
        self.flavor = flavor
        c = op.complex
        n = c.n_time
        parts = op.parts
        if reverse_slices:
            parts = {p: list(reversed(rows)) for p, rows in parts.items()}
        self._parts = parts
        if flavor == RETARDED:
            self.zero_parts = ((VERTEX, 0), (VERTEX, 1), (EDGE, 0))
            plan = [(((VERTEX, s), (EDGE, s - 1)), ((VERTEX, s + 1), (EDGE, s))) for s in range(1, n)]
        elif flavor == ADVANCED:
            self.zero_parts = ((VERTEX, n), (VERTEX, n - 1), (EDGE, n - 1))
            plan = [(((VERTEX, s), (EDGE, s)), ((VERTEX, s - 1), (EDGE, s - 1))) for s in range(n - 1, 0, -1)]
        else:
            raise BadSpec(f"unknown Green operator flavor {flavor!r}")
        known = set(self.zero_parts)
        steps = []
        for row_parts, unknown_parts in plan:
            steps.append(self._step(row_parts, unknown_parts, known))
            known.update(unknown_parts)
        self._steps = tuple(steps)

    def _step(self, row_parts, unknown_parts, known) -> _Step:
        rows = tuple(i for p in row_parts for i in self._parts[p])
        block = linalg.select_rows(self.op.matrix, rows)
        couplings = []
        for part, cols in self._parts.items():
            if not cols or part in unknown_parts:
                continue
            sub = linalg.select_cols(block, cols)
            if linalg.is_zero(sub):
                continue
            if part not in known:
                raise NonHyperbolic(f"rows of slice {row_parts[0][1]} couple to the undetermined slice {part}",
                                    slice=row_parts[0][1], block=part)
            couplings.append((part, sub))
        unknown_cols = [i for p in unknown_parts for i in self._parts[p]]
        if len(unknown_cols) != len(rows):
            raise NonHyperbolic(f"time-coupling block at slice {row_parts[0][1]} is not square",
                                slice=row_parts[0][1])
        if rows:
            b = linalg.select_cols(block, unknown_cols)
            try:
                inverse = b.to_dense().inv().to_sparse()
            except DMNonInvertibleMatrixError:
                raise NonHyperbolic(f"time-coupling block at slice {row_parts[0][1]} is singular",
                                    slice=row_parts[0][1], block=unknown_parts) from None
        else:
            inverse = linalg.zeros(0, 0)
        return _Step(rows, tuple(unknown_parts), tuple(couplings), inverse)

    def apply_matrix(self, sources: DomainMatrix) -> DomainMatrix:
        """Solve for every source column at once; rows and columns over ``complex.basis(k)``."""
        n_rows, r = sources.shape
        sources = sources.convert_to(QQ).to_sparse()
        values = {p: linalg.zeros(len(self._parts[p]), r) for p in self.zero_parts}
        for step in self._steps:
            residual = linalg.select_rows(sources, step.rows)
            for part, coupling in step.couplings:
                residual = linalg.sub(residual, linalg.matmul(coupling, values[part]))
            solved = linalg.matmul(step.inverse, residual)
            offset = 0
            for part in step.unknown_parts:
                size = len(self._parts[part])
                values[part] = linalg.select_rows(solved, range(offset, offset + size))
                offset += size
        entries = {}
        for part, block in values.items():
            rows = self._parts[part]
            for (i, j), v in linalg.entries(block).items():
                entries[(rows[i], j)] = v
        return linalg.matrix(n_rows, r, entries)

    @property
    def margin(self) -> int:
        return self.op.complex.margin

    def forbidden_cells(self) -> list:
        """Cells on which sources must vanish: the early time stratum for G⁺, the late one for G⁻."""
        c = self.op.complex
        stratum = c.time_strata["past" if self.flavor == RETARDED else "future"]
        return [cell for cell in c.cells[self.op.degree] if cell in stratum]

    def check_shadow(self, f: Cochain) -> None:
        """ShadowOverflow when the shadow of ``f`` in the solve direction meets the spatial boundary."""
        c = self.op.complex
        if not c.space_stratum:
            return
        direction = "future" if self.flavor == RETARDED else "past"
        hits = sorted(c.causal_shadow(f.support, direction) & c.space_stratum)
        if hits:
            raise ShadowOverflow(f"the {direction} shadow of the source reaches the spatial boundary at {hits[0]}",
                                 cell=hits[0])

    def __call__(self, f: Cochain) -> Cochain:
        op = self.op
        if f.complex is not op.complex:
            raise ComplexMismatch("source lives on another complex")
        for cell in self.forbidden_cells():
            if cell in f.values:
                raise MarginViolation(f"{self.flavor} source is nonzero on {cell}, inside the time margin "
                                      f"of {self.margin} slices", cell=cell, slice=cell.pos[0])
        self.check_shadow(f)
        return op.complex.cochain(op.degree, self.apply_matrix(op.complex.vector(f)))


@dataclass(frozen=True, eq=False)
class DAlembertOperator:
    """□ on unrestricted k-cochains with its per-slice decomposition.

    ``parts[(0, t)]`` lists the basis indices of the spatial-type cells over
    time vertex t and ``parts[(1, t)]`` those of the dt-type cells over time
    edge t.
    """

    complex: SpacetimeComplex
    degree: int
    matrix: DomainMatrix
    parts: dict

    @property
    def retarded(self) -> GreenOperator:
        return self.complex.cached(("green", self.degree, RETARDED), lambda: GreenOperator(self, RETARDED))

    @property
    def advanced(self) -> GreenOperator:
        return self.complex.cached(("green", self.degree, ADVANCED), lambda: GreenOperator(self, ADVANCED))

    def rows_of(self, *parts) -> list[int]:
        return [i for p in parts for i in self.parts.get(p, [])]

    def source_indices(self) -> list[int]:
        """Basis indices of the source space D: cochains vanishing on both boundary vertex slices."""
        n = self.complex.n_time
        dead = set(self.rows_of((VERTEX, 0), (VERTEX, n)))
        return [i for i in range(self.matrix.shape[0]) if i not in dead]

    def solution_rows(self) -> list[int]:
        """Rows on which G-images satisfy □u = 0."""
        n = self.complex.n_time
        dead = set(self.rows_of((VERTEX, 0), (EDGE, 0), (VERTEX, n), (EDGE, n - 1)))
        return [i for i in range(self.matrix.shape[0]) if i not in dead]


def build_dalembert(c: SpacetimeComplex, k: int) -> DAlembertOperator:
    """Assemble □ and certify hyperbolicity by building both Green recursions."""
    if not 0 <= k <= c.dim:
        raise BadDegree(f"□ acts on degrees 0..{c.dim}, got {k}", degree=k)

    def build() -> DAlembertOperator:
        if c.n_time < 2:
            raise NonHyperbolic("the time axis needs at least two cells for a slice recursion")
        parts: dict = {}
        for i, cell in enumerate(c.cells[k]):
            parts.setdefault((cell.dims[0], cell.pos[0]), []).append(i)
        for t in range(c.n_time + 1):
            parts.setdefault((VERTEX, t), [])
            if t < c.n_time:
                parts.setdefault((EDGE, t), [])
        op = DAlembertOperator(c, k, c.dalembert_matrix(k), parts)
        # building both recursions certifies hyperbolicity
        op.retarded, op.advanced
        logger.debug("□ on degree %d: %d cells, %d time slices", k, op.matrix.shape[0], c.n_time)
        return op

    return c.cached(("box_op", k), build)


def retarded(op: DAlembertOperator, f: Cochain) -> Cochain:
    return op.retarded(f)


def advanced(op: DAlembertOperator, f: Cochain) -> Cochain:
    return op.advanced(f)


def causal_propagator(op: DAlembertOperator, f: Cochain) -> Cochain:
    """G = G⁺ - G⁻."""
    return op.retarded(f) - op.advanced(f)


def propagator_matrix(op: DAlembertOperator, sources: DomainMatrix) -> DomainMatrix:
    """G applied to source columns over ``complex.basis(k)``; rows of D only are meaningful."""
    return linalg.sub(op.retarded.apply_matrix(sources), op.advanced.apply_matrix(sources))


# --- validators ---


def _random_sources(c: SpacetimeComplex, k: int, cells: list, count: int, rng: random.Random) -> DomainMatrix:
    index = c.index[k]
    entries = {}
    for j in range(count):
        for cell in rng.sample(cells, min(len(cells), 3)):
            entries[(index[cell], j)] = Fraction(rng.randint(-5, 5), rng.randint(1, 3))
    return linalg.matrix(len(c.cells[k]), count, entries)


def _forbid_rows(m: DomainMatrix, rows) -> DomainMatrix:
    keep = set(rows)
    return linalg.matrix(m.shape[0], m.shape[1], {(i, j): v for (i, j), v in linalg.entries(m).items()
                                                 if i not in keep})


def green_identities(op: DAlembertOperator, samples: int = 50, seed: int = 0) -> dict:
    """Exact Green identities on random sources: inversion, cones, antisymmetry, intertwining."""
    c, k = op.complex, op.degree
    n = c.n_time
    rng = random.Random(seed)
    box = op.matrix
    domain_cells = [c.cells[k][i] for i in op.source_indices()]
    compact_cells = c.basis(k, C)
    f = _random_sources(c, k, domain_cells, samples, rng)
    g = _random_sources(c, k, compact_cells, samples, rng)
    plus, minus = op.retarded, op.advanced
    gp = plus.apply_matrix(f)
    gm = minus.apply_matrix(f)
    out = {"k": k, "samples": samples}

    plus_rows = op.rows_of((VERTEX, n), (EDGE, n - 1))
    minus_rows = op.rows_of((VERTEX, 0), (EDGE, 0))
    out["box_retarded"] = linalg.equal(_forbid_rows(linalg.matmul(box, gp), plus_rows), _forbid_rows(f, plus_rows))
    out["box_advanced"] = linalg.equal(_forbid_rows(linalg.matmul(box, gm), minus_rows),
                                       _forbid_rows(f, minus_rows))
    box_g = linalg.matmul(box, g)
    out["retarded_inverts_box"] = linalg.equal(plus.apply_matrix(box_g), g)
    out["advanced_inverts_box"] = linalg.equal(minus.apply_matrix(box_g), g)
    out["kills_box"] = linalg.is_zero(linalg.sub(plus.apply_matrix(box_g), minus.apply_matrix(box_g)))

    reordered = GreenOperator(op, RETARDED, reverse_slices=True)
    out["ordering_independent"] = linalg.equal(reordered.apply_matrix(f), gp)

    cone_ok = True
    for j in range(min(samples, 10)):
        src = c.cochain(k, linalg.select_cols(f, [j]))
        future = c.causal_shadow(src.support, "future")
        past = c.causal_shadow(src.support, "past")
        if not c.cochain(k, linalg.select_cols(gp, [j])).support <= future:
            cone_ok = False
        if not c.cochain(k, linalg.select_cols(gm, [j])).support <= past:
            cone_ok = False
    out["cones"] = cone_ok

    gram = c.gram(k)
    prop_g = propagator_matrix(op, g)
    pairing = linalg.matmul(linalg.matmul(g.transpose(), gram), prop_g)
    out["antisymmetric"] = linalg.is_zero(linalg.add(pairing, pairing.transpose()))

    if k < c.dim:
        up = build_dalembert(c, k + 1)
        d = c.coboundary_matrix(k)
        out["d_intertwines"] = linalg.equal(linalg.matmul(d, prop_g), propagator_matrix(up, linalg.matmul(d, g)))
    if k > 0:
        down = build_dalembert(c, k - 1)
        delta = c.codifferential_matrix(k)
        ends = down.rows_of((VERTEX, 0), (VERTEX, n))
        out["delta_intertwines"] = linalg.equal(
            _forbid_rows(linalg.matmul(delta, prop_g), ends),
            _forbid_rows(propagator_matrix(down, linalg.matmul(delta, g)), ends),
        )
    out["ok"] = all(v for key, v in out.items() if isinstance(v, bool))
    return out


def step_cutoff(op: DAlembertOperator, cut: int | None = None) -> DomainMatrix:
    """Diagonal χ₊: 1 on cells over time vertices and edges ≥ ``cut``."""
    c = op.complex
    n = c.n_time
    cut = min(max(n // 2, 2), n - 1) if cut is None else cut
    if not 2 <= cut <= n - 1:
        raise BadSpec(f"cutoff slice {cut} must lie in [2, {n - 1}]")
    rows = [i for i, cell in enumerate(c.cells[op.degree]) if cell.pos[0] >= cut]
    size = op.matrix.shape[0]
    return linalg.matrix(size, size, {(i, i): 1 for i in rows})


def cutoff_source(op: DAlembertOperator, solutions: DomainMatrix, cut: int | None = None) -> DomainMatrix:
    """Sources f = □(χ₊u) with the far boundary rows dropped, so that G f = u."""
    n = op.complex.n_time
    f = linalg.matmul(op.matrix, linalg.matmul(step_cutoff(op, cut), solutions))
    return _forbid_rows(f, op.rows_of((VERTEX, 0), (VERTEX, n), (EDGE, n - 1)))


def verify_exact_sequence(op: DAlembertOperator) -> dict:
    """Rank bookkeeping for C_c --□--> D --G--> Sol with the constructive cutoff check."""
    c, k = op.complex, op.degree
    box = op.matrix
    compact = [c.index[k][cell] for cell in c.basis(k, C)]
    domain = op.source_indices()
    box_c = linalg.select_cols(box, compact)
    rank_box_c = linalg.rank(box_c)

    g_d = propagator_matrix(op, linalg.selector(domain, box.shape[0]).transpose())
    kernel_g = linalg.kernel_basis(g_d)
    box_c_in_d = linalg.select_rows(box_c, domain)
    leaks = linalg.select_rows(box_c, [i for i in range(box.shape[0]) if i not in set(domain)])

    sol_rows = op.solution_rows()
    solutions = linalg.kernel_basis(linalg.select_rows(box, sol_rows))
    spatial = c.space
    expected = 2 * (len(spatial.cells[k]) if k <= spatial.dim else 0) + \
        2 * (len(spatial.cells[k - 1]) if k >= 1 else 0)

    hits = True
    if solutions.dim:
        hits = linalg.equal(propagator_matrix(op, cutoff_source(op, solutions.basis)), solutions.basis)
    out = {
        "k": k,
        "dim_compact": len(compact),
        "kernel_box_compact": len(compact) - rank_box_c,
        "rank_box_compact": rank_box_c,
        "box_compact_in_domain": linalg.is_zero(leaks),
        "dim_domain": len(domain),
        "kernel_G": kernel_g.dim,
        "G_kills_box": linalg.is_zero(linalg.matmul(g_d, box_c_in_d)),
        "rank_G": g_d.shape[1] - kernel_g.dim,
        "dim_solutions": solutions.dim,
        "expected_dim_solutions": expected,
        "G_lands_in_solutions": linalg.is_zero(linalg.matmul(linalg.select_rows(box, sol_rows), g_d)),
        "cutoff_hits": hits,
    }
    out["ok"] = (out["kernel_box_compact"] == 0 and out["box_compact_in_domain"] and out["G_kills_box"]
                 and out["kernel_G"] == rank_box_c and out["rank_G"] == out["dim_solutions"] == expected
                 and out["G_lands_in_solutions"] and hits)
    logger.debug("exact sequence on degree %d: %s", k, out)
    return out


def check_shadow_clear(e: Embedding, cells) -> None:
    """ShadowOverflow when the causal shadow of ``cells`` comes within one spatial step of the image frontier."""
    m = e.source
    frontier = [m.spatial_part(cell) for cell in e.spatial_frontier]
    if not frontier:
        return
    danger_dist = m.space.distance_from(frontier)
    for cell in sorted(m.causal_shadow(cells, "both")):
        if any(danger_dist.get(v, 2) <= 1 for v in m.space.vertices(m.spatial_part(cell))):
            raise ShadowOverflow(f"the causal shadow reaches {cell} next to the image frontier; enlarge the region",
                                 cell=cell)


def naturality_check(e: Embedding, k: int, f: Cochain) -> dict:
    """pullback(G_N(pushforward f)) = G_M f for a spacing-matched embedding.

    Refuses with ShadowOverflow when the causal shadow of ``f`` comes within
    one spatial step of the image frontier.
    """
    m, n = e.source, e.target
    if not isinstance(m, SpacetimeComplex) or not isinstance(n, SpacetimeComplex):
        raise BadSpec("naturality needs spacetime complexes")
    if not e.spacings_match():
        raise BadSpec("naturality needs equal spacings on source and target")
    check_shadow_clear(e, f.support)
    op_m, op_n = build_dalembert(m, k), build_dalembert(n, k)
    direct = causal_propagator(op_m, f)
    transported = pullback(e, causal_propagator(op_n, pushforward(e, f)))
    return {"k": k, "natural": direct == transported, "support": len(direct.support)}
