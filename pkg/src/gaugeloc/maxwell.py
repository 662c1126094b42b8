"""Maxwell k-form observables and their locality audits.

An observable is a class of compactly supported coclosed k-cochains ω modulo
δd of compactly supported ones; it evaluates a field A as the metric pairing
(ω, A). The presymplectic form is τ(ω, ω′) = (ω, Gω′) with the exact causal
propagator. Every matrix here is over the basis of compactly supported
k-cochains unless a name says otherwise.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction

from sympy.polys.matrices import DomainMatrix

from gaugeloc import linalg
from gaugeloc.cohomology import cohomology, induced_map, support_map
from gaugeloc.complex import (
    C,
    FREE,
    TC,
    Cochain,
    CubicalComplex,
    Embedding,
    SpacetimeComplex,
    SupportSystem,
    metric_pairing,
    pushforward_matrix,
)
from gaugeloc.errors import (
    BadDegree,
    BadSpec,
    ComplexMismatch,
    NotInSpan,
    ShadowsIntersect,
    SupportLeak,
    WindowTooThin,
)
from gaugeloc.propagator import EDGE, VERTEX, build_dalembert, check_shadow_clear, propagator_matrix, step_cutoff

logger = logging.getLogger(__name__)


def _check_degree(c: CubicalComplex, k: int) -> None:
    if not 1 <= k <= c.dim - 1:
        raise BadDegree(f"Maxwell observables need 1 <= k <= {c.dim - 1}; k = {k} carries no gauge freedom "
                        f"or no dynamics", degree=k)


# --- support bookkeeping ---


def inclusion(c: CubicalComplex, k: int, s: SupportSystem) -> DomainMatrix:
    """Extension by zero from C^k_s into all k-cochains."""

    def build() -> DomainMatrix:
        index = c.basis_index(k, FREE)
        cells = c.basis(k, s)
        return linalg.matrix(len(index), len(cells), {(index[cell], j): 1 for j, cell in enumerate(cells)})

    return c.cached(("inclusion", k, s), build)


def _split_rows(c: CubicalComplex, k: int, s: SupportSystem) -> tuple[list[int], list[int]]:
    """Indices of all k-cells allowed by s, in C_s order, and of the rest."""
    index = c.basis_index(k, FREE)
    inside = [index[cell] for cell in c.basis(k, s)]
    keep = set(inside)
    return inside, [i for i in range(len(index)) if i not in keep]


def coclosed_subspace(c: CubicalComplex, k: int, s: SupportSystem = C) -> linalg.Subspace:
    """ker δ inside C^k_s, with δ the unrestricted codifferential."""
    return c.cached(("coclosed", k, s),
                    lambda: linalg.kernel_basis(linalg.matmul(c.codifferential_matrix(k), inclusion(c, k, s))))


def vanishing_subspace(c: CubicalComplex, k: int, s: SupportSystem = C) -> linalg.Subspace:
    """δd(C^k_s) ∩ C^k_s."""

    def build() -> linalg.Subspace:
        dd = linalg.matmul(c.codifferential_matrix(k + 1), linalg.matmul(c.coboundary_matrix(k), inclusion(c, k, s)))
        inside, outside = _split_rows(c, k, s)
        stays = linalg.kernel_basis(linalg.select_rows(dd, outside))
        return linalg.span(linalg.matmul(linalg.select_rows(dd, inside), stays.basis))

    return c.cached(("vanishing", k, s), build)


def _support_of(c: CubicalComplex, k: int, s: SupportSystem, vectors: DomainMatrix) -> frozenset:
    cells = c.basis(k, s)
    return frozenset(cells[i] for i, _ in linalg.entries(vectors))


# --- observables ---


@dataclass(frozen=True, eq=False)
class MaxwellObservables:
    """Obs = Inv / Van on degree k with the presymplectic Gram matrix on its echelon basis."""

    complex: SpacetimeComplex
    degree: int
    inv: linalg.Subspace
    van: linalg.Subspace
    quotient: linalg.QuotientMap
    gram: DomainMatrix
    radical: linalg.Subspace
    tau_vanishes_on_van: bool

    @property
    def dim(self) -> int:
        return self.quotient.dim

    @property
    def representatives(self) -> DomainMatrix:
        """One coclosed compact cochain per basis observable, over ``basis(k, C)``."""
        return self.quotient.representatives

    def coordinates(self, vectors: DomainMatrix) -> DomainMatrix:
        """Observable coordinates of coclosed compact columns; NotInSpan otherwise."""
        self.inv.coordinates(vectors)
        return self.quotient(vectors)

    def cochain(self, coords) -> Cochain:
        """Representative cochain of the observable with the given coordinates."""
        return self.complex.cochain(self.degree, linalg.matmul(self.representatives, linalg.column(coords)), C)

    def tau(self, a, b) -> Fraction:
        value = linalg.matmul(linalg.matmul(linalg.column(a).transpose(), self.gram), linalg.column(b))
        return linalg.entries(value).get((0, 0), Fraction(0))


def observables(c: SpacetimeComplex, k: int) -> MaxwellObservables:
    """Inv, Van, their quotient and τ(ω, ω′) = (ω, Gω′) on the quotient basis."""
    _check_degree(c, k)

    def build() -> MaxwellObservables:
        inv = coclosed_subspace(c, k, C)
        van = vanishing_subspace(c, k, C)
        quotient = linalg.quotient_coordinates(van, inv)
        op = build_dalembert(c, k)
        incl = inclusion(c, k, C)
        metric = c.gram(k)
        reps = linalg.matmul(incl, quotient.representatives)
        gram = linalg.matmul(linalg.matmul(reps.transpose(), metric), propagator_matrix(op, reps))
        van_full = linalg.matmul(incl, van.basis)
        inv_full = linalg.matmul(incl, inv.basis)
        on_van = linalg.matmul(linalg.matmul(inv_full.transpose(), metric), propagator_matrix(op, van_full))
        radical = linalg.kernel_basis(gram)
        logger.debug("Maxwell observables on degree %d: inv %d, van %d, obs %d, radical %d",
                     k, inv.dim, van.dim, quotient.dim, radical.dim)
        return MaxwellObservables(c, k, inv, van, quotient, gram, radical, linalg.is_zero(on_van))

    return c.cached(("maxwell_obs", k), build)


def radical(obs: MaxwellObservables) -> dict:
    """The gram nullspace against the electric-flux observables ev_{δθ}.

    θ runs over compact closed (k+1)-cochains with δθ compact that are d of a
    timelike-compact k-cochain; their classes span ker(H_c^{k+1} -> H_tc^{k+1}).
    """
    c, k = obs.complex, obs.degree
    up = k + 1
    h_c = cohomology(c, up, C)
    kernel = linalg.kernel_basis(support_map(c, up, C, TC))

    delta_up = linalg.matmul(c.codifferential_matrix(up), inclusion(c, up, C))
    inside, outside = _split_rows(c, k, C)
    n_up = len(c.basis(up, C))
    closed_with_compact_delta = linalg.kernel_basis(
        linalg.vstack(c.coboundary_matrix(up, C), linalg.select_rows(delta_up, outside), cols=n_up))
    tc_index = c.basis_index(up, TC)
    c_rows = [tc_index[cell] for cell in c.basis(up, C)]
    to_tc = linalg.selector(c_rows, len(tc_index)).transpose()
    exact_tc = linalg.span(c.coboundary_matrix(k, TC))
    both = linalg.intersect(linalg.span(linalg.matmul(to_tc, closed_with_compact_delta.basis)), exact_tc)
    thetas = linalg.select_rows(both.basis, c_rows)

    flux_classes = linalg.span(h_c.coordinates(thetas)) if both.dim else linalg.zero_subspace(h_c.dim)
    flux = (linalg.span(obs.coordinates(linalg.select_rows(linalg.matmul(delta_up, thetas), inside)))
            if both.dim else linalg.zero_subspace(obs.dim))
    agree = flux.dim == obs.radical.dim and (not flux.dim or obs.radical.contains(flux.basis))
    out = {
        "k": k,
        "dim_obs": obs.dim,
        "radical_dim": obs.radical.dim,
        "cohomology_kernel_dim": kernel.dim,
        "flux_classes_dim": flux_classes.dim,
        "flux_dim": flux.dim,
        "spans_agree": agree,
        "flux_map_injective": flux.dim == flux_classes.dim,
        "radical_basis": _basis_rows(obs.radical),
    }
    out["ok"] = (agree and out["flux_map_injective"] and flux_classes.dim == kernel.dim == obs.radical.dim
                 and obs.tau_vanishes_on_van)
    return out


def _basis_rows(space: linalg.Subspace) -> list[tuple[Fraction, ...]]:
    return [tuple(linalg.column_entries(space.basis, j).get(i, Fraction(0)) for i in range(space.ambient_dim))
            for j in range(space.dim)]


# --- solutions ---


@dataclass(frozen=True, eq=False)
class MaxwellSolutions:
    """Timelike-compact coclosed sources modulo δd of timelike-compact ones, with their G-images."""

    complex: SpacetimeComplex
    degree: int
    sources: linalg.QuotientMap
    fields: DomainMatrix
    report: dict

    @property
    def dim(self) -> int:
        return self.sources.dim

    def field_cochains(self) -> list[Cochain]:
        return self.complex.cochains(self.degree, self.fields)


def solution_space(c: SpacetimeComplex, k: int) -> MaxwellSolutions:
    """[Sol] representatives Gθ and the checks tying them to the observables.

    The evaluation pairing of observables against solutions has rank
    dim Obs - dim radical: radical observables read zero on every G-image.
    """
    _check_degree(c, k)
    op = build_dalembert(c, k)
    quotient = linalg.quotient_coordinates(vanishing_subspace(c, k, TC), coclosed_subspace(c, k, TC))
    reps = linalg.matmul(inclusion(c, k, TC), quotient.representatives)
    fields = propagator_matrix(op, reps)

    dd = linalg.matmul(c.codifferential_matrix(k + 1), c.coboundary_matrix(k))
    on_shell = linalg.is_zero(linalg.select_rows(linalg.matmul(dd, fields), op.solution_rows()))
    gauge = c.coboundary_matrix(k - 1)
    gauge_rank = linalg.rank(gauge)
    injective = linalg.rank(linalg.hstack(gauge, fields, rows=gauge.shape[0])) - gauge_rank == quotient.dim

    obs = observables(c, k)
    metric = c.gram(k)
    incl = inclusion(c, k, C)
    van_reads = linalg.matmul(linalg.matmul(linalg.matmul(incl, obs.van.basis).transpose(), metric), fields)
    evaluation = linalg.matmul(linalg.matmul(linalg.matmul(incl, obs.representatives).transpose(), metric), fields)
    eval_rank = linalg.rank(evaluation)
    report = {
        "k": k,
        "dim_classes": quotient.dim,
        "on_shell": on_shell,
        "injective_mod_gauge": injective,
        "van_annihilates_solutions": linalg.is_zero(van_reads),
        "evaluation_rank": eval_rank,
        "evaluation_rank_expected": obs.dim - obs.radical.dim,
        "separates_solutions": eval_rank == quotient.dim,
    }
    report["ok"] = (on_shell and injective and report["van_annihilates_solutions"]
                    and eval_rank == report["evaluation_rank_expected"])
    logger.debug("Maxwell solutions on degree %d: %s", k, report)
    return MaxwellSolutions(c, k, quotient, fields, report)


def lorenz_gauge(c: SpacetimeComplex, field: Cochain, cut: int | None = None) -> dict:
    """χ = -δ(G⁺(χ₊A) + G⁻(χ₋A)) and the gauge-equivalent field A + dχ.

    δ(A + dχ) vanishes on every cell away from the two outermost vertex
    slices and edge slice at each end of the window.
    """
    k = field.degree
    if k < 1:
        raise BadDegree("gauge fixing needs a field of degree at least 1", degree=k)
    op = build_dalembert(c, k)
    a = c.vector(field)
    plus_src = linalg.matmul(step_cutoff(op, cut), a)
    minus_src = linalg.sub(a, plus_src)
    b = linalg.add(op.retarded.apply_matrix(plus_src), op.advanced.apply_matrix(minus_src))
    chi = c.cochain(k - 1, -linalg.matmul(c.codifferential_matrix(k), b))
    fixed = field + chi.d()
    n = c.n_time
    ends = {(VERTEX, 0), (VERTEX, 1), (EDGE, 0), (VERTEX, n - 1), (VERTEX, n), (EDGE, n - 1)}
    residual = fixed.delta()
    stray = sorted(cell for cell in residual.support if (cell.dims[0], cell.pos[0]) not in ends)
    return {"chi": chi, "field": fixed, "lorenz": not stray, "stray": stray[:5]}


def evaluate(omega: Cochain, field: Cochain) -> Fraction:
    """ev_ω(A) = (ω, A); gauge invariant when ω is coclosed."""
    return metric_pairing(omega, field)


# --- embeddings ---


def compact_pushforward(e: Embedding, k: int) -> DomainMatrix:
    """Extension by zero on compact k-cochains; SupportLeak if the collar meets their cells."""
    leak = set(e.source.basis(k, C)) & e.collar()
    if leak:
        bad = min(leak)
        raise SupportLeak(f"compact cell {bad} lies in the collar of embedding {e.name!r}", cell=bad)
    return pushforward_matrix(e, k, C, C)


def observable_map(e: Embedding, k: int) -> DomainMatrix:
    """Matrix of the induced map Obs(source) -> Obs(target) in observable coordinates."""
    obs_m, obs_n = observables(e.source, k), observables(e.target, k)
    images = linalg.matmul(compact_pushforward(e, k), obs_m.representatives)
    try:
        return obs_n.coordinates(images)
    except NotInSpan:
        raise BadSpec(f"pushed observables of {e.name!r} are not coclosed in the target; spacings differ") from None


def _kernel(e: Embedding, k: int) -> linalg.Subspace:
    return linalg.kernel_basis(observable_map(e, k))


def component_integrals(omega: Cochain) -> tuple[Fraction, ...]:
    """Sum of a top-degree cochain over each component."""
    c = omega.complex
    sums = [Fraction(0)] * c.components
    for cell, value in omega.values.items():
        sums[cell.component] += value
    return tuple(sums)


def locality_kernel(e: Embedding, k: int) -> dict:
    """ker of Obs(source) -> Obs(target), cross-checked against ker H_c^{k+1}(e)."""
    m = e.source
    obs = observables(m, k)
    kernel = _kernel(e, k)
    h_map = induced_map(e, k + 1, C)
    h_kernel = linalg.kernel_basis(h_map)
    out = {
        "k": k,
        "embedding": e.name,
        "dim_obs": obs.dim,
        "kernel_dim": kernel.dim,
        "cohomology_kernel_dim": h_kernel.dim,
        "kernel_in_radical": not kernel.dim or obs.radical.contains(kernel.basis),
        "kernel_basis": _basis_rows(kernel),
    }
    if k + 1 == m.dim and h_kernel.dim:
        reps = linalg.matmul(cohomology(m, k + 1, C).representatives, h_kernel.basis)
        integrals = []
        for theta in m.cochains(k + 1, reps, C):
            sums = component_integrals(theta)
            last = next(v for v in reversed(sums) if v)
            integrals.append(tuple(v / last for v in sums))
        out["component_integrals"] = integrals
    out["ok"] = out["kernel_dim"] == out["cohomology_kernel_dim"] and out["kernel_in_radical"]
    logger.debug("locality kernel of %s on degree %d: %d", e.name, k, kernel.dim)
    return out


def no_go_witness(f: Embedding, h: Embedding, k: int) -> dict:
    """A radical observable of M killed along h whose image along f pairs nontrivially in N.

    Any subfunctor quotient restoring locality would have to kill it along h
    and keep it along f.
    """
    if f.source is not h.source:
        raise ComplexMismatch("both embeddings must start from the same region")
    obs_m, obs_n = observables(f.source, k), observables(f.target, k)
    killed = _kernel(h, k)
    out = {"k": k, "f": f.name, "h": h.name, "killed_dim": killed.dim, "found": False}
    if not killed.dim:
        out["reason"] = f"the observable map along {h.name!r} is injective"
        return out
    images = linalg.matmul(observable_map(f, k), killed.basis)
    pairings = linalg.matmul(images.transpose(), obs_n.gram)
    for i in range(killed.dim):
        row = linalg.column_entries(pairings.transpose(), i)
        if not row:
            continue
        partner = min(row)
        witness = linalg.select_cols(killed.basis, [i])
        out.update({
            "found": True,
            "witness": tuple(linalg.column_entries(witness).get(j, Fraction(0)) for j in range(obs_m.dim)),
            "witness_in_radical": linalg.is_zero(linalg.matmul(obs_m.gram, witness)),
            "image": tuple(linalg.column_entries(images, i).get(j, Fraction(0)) for j in range(obs_n.dim)),
            "partner": partner,
            "pairing": row[partner],
        })
        return out
    out["reason"] = f"every image along {f.name!r} lies in the target radical"
    return out


def causality_check(f1: Embedding, f2: Embedding, k: int) -> dict:
    """τ between the images of two causally disjoint regions is exactly zero."""
    if f1.target is not f2.target:
        raise ComplexMismatch("causality needs two regions of the same target")
    n = f1.target
    pushed = [linalg.matmul(compact_pushforward(e, k), observables(e.source, k).representatives) for e in (f1, f2)]
    first, second = (_support_of(n, k, C, v) for v in pushed)
    overlap = n.causal_shadow(first, "both") & second
    if overlap:
        bad = min(overlap)
        raise ShadowsIntersect(f"the causal shadow of {f1.name!r} meets {f2.name!r} at {bad}", cell=bad)
    op = build_dalembert(n, k)
    incl = inclusion(n, k, C)
    a, b = (linalg.matmul(incl, v) for v in pushed)
    block = linalg.matmul(linalg.matmul(a.transpose(), n.gram(k)), propagator_matrix(op, b))
    out = {"k": k, "shape": block.shape, "zero_block": linalg.is_zero(block)}
    out["ok"] = out["zero_block"]
    return out


def is_time_window(e: Embedding) -> bool:
    m, n = e.source, e.target
    if len(m.space.cells[0]) != len(n.space.cells[0]) or m.space.dim != n.space.dim:
        return False
    offsets = {img.pos[0] - cell.pos[0] for cell, img in e.cell_map.items()}
    return len(offsets) == 1 and all(m.spatial_part(cell) == n.spatial_part(img) for cell, img in e.cell_map.items())


def timeslice_check(e: Embedding, k: int) -> dict:
    """The observable map of a full-space time sub-window is bijective."""
    if not is_time_window(e):
        raise BadSpec(f"{e.name!r} is not a full-space time sub-window")
    m = e.source
    interior = 2 * m.n_time - 4 * m.margin + 3
    if interior < 3:
        raise WindowTooThin(f"the window has {interior} interior slices; at least 3 are needed", slices=interior)
    mapping = observable_map(e, k)
    rank = linalg.rank(mapping)
    out = {"k": k, "source_dim": mapping.shape[1], "target_dim": mapping.shape[0], "rank": rank}
    out["bijective"] = rank == mapping.shape[0] == mapping.shape[1]
    out["ok"] = out["bijective"]
    return out


def _full_space(d: int) -> linalg.Subspace:
    return linalg.span(linalg.identity(d))


def isotony_quotient(regions: list[Embedding], k: int, inclusions=()) -> dict:
    """Quotient each region's observables by the kernel towards the common target.

    ``inclusions`` lists ``(inner, outer, embedding)`` index pairs between
    regions; the quotient maps along them must be injective too.
    """
    if len({id(e.target) for e in regions}) > 1:
        raise ComplexMismatch("isotony needs every region in the same target")
    quotients = []
    rows = []
    for e in regions:
        mapping = observable_map(e, k)
        dim = mapping.shape[1]
        kernel = linalg.kernel_basis(mapping)
        q = linalg.quotient_coordinates(kernel, _full_space(dim))
        rank = linalg.rank(linalg.matmul(mapping, q.representatives))
        quotients.append(q)
        rows.append({"region": e.name, "dim": dim, "kernel_dim": kernel.dim, "quotient_dim": q.dim,
                     "injective": rank == q.dim})
    nested = []
    for inner, outer, emb in inclusions:
        mapped = linalg.matmul(quotients[outer].matrix,
                               linalg.matmul(observable_map(emb, k), quotients[inner].representatives))
        nested.append({"inner": regions[inner].name, "outer": regions[outer].name,
                       "injective": linalg.rank(mapped) == quotients[inner].dim})
    return {"k": k, "regions": rows, "nested": nested,
            "ok": all(r["injective"] for r in rows) and all(r["injective"] for r in nested)}


def presymplectic_preserved(e: Embedding, k: int) -> dict:
    """gram(source) equals the target gram pulled back to the pushed observable basis."""
    if not e.spacings_match():
        raise BadSpec(f"{e.name!r} changes spacings; τ cannot be compared")
    m, n = e.source, e.target
    obs = observables(m, k)
    check_shadow_clear(e, _support_of(m, k, C, obs.representatives))
    pushed = linalg.matmul(inclusion(n, k, C), linalg.matmul(compact_pushforward(e, k), obs.representatives))
    transported = propagator_matrix(build_dalembert(n, k), pushed)
    pulled = linalg.matmul(linalg.matmul(pushed.transpose(), n.gram(k)), transported)
    out = {"k": k, "embedding": e.name, "dim_obs": obs.dim, "preserved": linalg.equal(obs.gram, pulled)}
    out["ok"] = out["preserved"]
    return out
