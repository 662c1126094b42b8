"""Support-restricted cohomology, induced maps, the time homotopy toolkit, dualities and integer H¹."""

import logging
from dataclasses import dataclass
from fractions import Fraction

from sympy.polys.domains import QQ, ZZ
from sympy.polys.matrices import DomainMatrix

from gaugeloc import linalg
from gaugeloc.complex import (
    CIRCLE,
    FREE,
    SC,
    TC,
    Cochain,
    CubicalComplex,
    Embedding,
    Flag,
    SpacetimeComplex,
    SupportSystem,
    metric_pairing,
    pullback,
    pushforward,
    wedge_pairing,
)
from gaugeloc.errors import BadProfile, BadSpec, SupportLeak, TorsionDetected

logger = logging.getLogger(__name__)

FLAVORS = {"d": "d", "delta": "delta", "δ": "delta"}


def _flavor(name: str) -> str:
    try:
        return FLAVORS[name]
    except KeyError:
        raise BadSpec(f"unknown differential flavor {name!r}; use 'd' or 'delta'") from None


# --- cohomology spaces ---


@dataclass(frozen=True, eq=False)
class CohomologySpace:
    """H^k of (C_work, d) or (C_work, δ).

    For flavor ``delta`` the cochains live in the dual support
    ``support.dual()``; ``work`` records which one the vectors are written in.
    """

    complex: CubicalComplex
    degree: int
    support: SupportSystem
    flavor: str
    work: SupportSystem
    cocycles: linalg.Subspace
    coboundaries: linalg.Subspace
    quotient: linalg.QuotientMap

    @property
    def dim(self) -> int:
        return self.quotient.dim

    @property
    def representatives(self) -> DomainMatrix:
        """One cocycle per class, as columns over ``complex.basis(degree, work)``."""
        return self.quotient.representatives

    def representative_cochains(self) -> list[Cochain]:
        return self.complex.cochains(self.degree, self.representatives, self.work)

    def coordinates(self, vectors: DomainMatrix) -> DomainMatrix:
        """Class coordinates of cocycle columns; NotInSpan if a column is not a cocycle."""
        self.cocycles.coordinates(vectors)
        return self.quotient(vectors)

    def class_of(self, omega: Cochain) -> tuple[Fraction, ...]:
        coords = linalg.column_entries(self.coordinates(self.complex.vector(omega, self.work)))
        return tuple(coords.get(i, Fraction(0)) for i in range(self.dim))

    def is_exact(self, omega: Cochain) -> bool:
        return not any(self.class_of(omega))


def cohomology(c: CubicalComplex, k: int, s: SupportSystem = FREE, flavor: str = "d") -> CohomologySpace:
    """H^k_{s,d} as ker d / im d, or H^k_{s,δ} as ker δ / im δ on the dual support."""
    flavor = _flavor(flavor)

    def build() -> CohomologySpace:
        if flavor == "d":
            work = s
            cycle_op = c.coboundary_matrix(k, work)
            bound_op = c.coboundary_matrix(k - 1, work)
        else:
            work = s.dual()
            cycle_op = c.codifferential_matrix(k, work)
            bound_op = c.codifferential_matrix(k + 1, work)
        z = linalg.kernel_basis(cycle_op)
        b = linalg.span(bound_op)
        q = linalg.quotient_coordinates(b, z)
        logger.debug("H^%d_{%s,%s}: cocycles %d, coboundaries %d, dim %d", k, s.name, flavor, z.dim, b.dim, q.dim)
        return CohomologySpace(c, k, s, flavor, work, z, b, q)

    return c.cached(("H", k, s, flavor), build)


def dims(c: CubicalComplex, s: SupportSystem = FREE, flavor: str = "d") -> tuple[int, ...]:
    return tuple(cohomology(c, k, s, flavor).dim for k in range(c.dim + 1))


def raw_dimension(c: CubicalComplex, k: int, s: SupportSystem = FREE, flavor: str = "d") -> int:
    """Brute-force dim H^k from the ranks of the two unreduced operator matrices."""
    if _flavor(flavor) == "d":
        a, b = c.coboundary_matrix(k, s), c.coboundary_matrix(k - 1, s)
        n = len(c.basis(k, s))
    else:
        a, b = c.codifferential_matrix(k, s.dual()), c.codifferential_matrix(k + 1, s.dual())
        n = len(c.basis(k, s.dual()))
    return n - linalg.rank(a) - linalg.rank(b)


def _poly_mul(p: list[int], q: list[int]) -> list[int]:
    out = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] += a * b
    return out


def _axis_poly(kind: str, flag: Flag) -> list[int]:
    if kind == CIRCLE:
        return [1, 1]
    return {Flag.FREE: [1, 0], Flag.COMPACT: [0, 1]}.get(flag, [0, 0])


def kunneth_prediction(c: SpacetimeComplex, k: int, s: SupportSystem = FREE, flavor: str = "d") -> int:
    """dim H^k_s predicted from a product formula over the time axis and the spatial factor.

    Undeleted spatial boxes contribute the product of their axis Poincaré
    polynomials. A spatial complex with holes is measured directly with
    ``raw_dimension``, so for it the prediction checks only the product over
    the time axis.
    """
    if _flavor(flavor) == "delta":
        s = s.dual()
    space = c.space
    if any(comp.deleted for comp in space.spec):
        spatial_s = SupportSystem(Flag.FREE, s.space_flag)
        sigma = [raw_dimension(space, j, spatial_s) for j in range(space.dim + 1)]
    else:
        sigma = [0] * (space.dim + 1)
        for comp in space.spec:
            poly = [1]
            for axis in comp.axes:
                poly = _poly_mul(poly, _axis_poly(axis.kind, s.space_flag))
            sigma = [a + b for a, b in zip(sigma, poly)]
    total = _poly_mul(_axis_poly(c.time.kind, s.time_flag), sigma)
    return total[k] if 0 <= k < len(total) else 0


# --- maps between cohomology spaces ---


def class_matrix(source: CohomologySpace, target: CohomologySpace, cochain_map: DomainMatrix) -> DomainMatrix:
    """Matrix in class coordinates of a cochain map written over the two working bases."""
    if not source.dim:
        return linalg.zeros(target.dim, 0)
    return target.coordinates(linalg.matmul(cochain_map, source.representatives))


def _uses_pushforward(s: SupportSystem) -> bool:
    return Flag.COMPACT in (s.time_flag, s.space_flag)


def induced_map(e: Embedding, k: int, s: SupportSystem, flavor: str = "d") -> DomainMatrix:
    """Class-coordinate matrix of the map induced by ``e``.

    Supports with a compact flag in their working complex push forward
    (covariant, ``dim H(target) x dim H(source)``); unrestricted ones pull
    back (contravariant, ``dim H(source) x dim H(target)``).
    """
    src = cohomology(e.source, k, s, flavor)
    tgt = cohomology(e.target, k, s, flavor)
    if _uses_pushforward(src.work):
        columns = []
        for rep in src.representative_cochains():
            pushed = pushforward(e, rep)
            columns.append(e.target.vector(pushed, tgt.work))
        if not columns:
            return linalg.zeros(tgt.dim, 0)
        return tgt.coordinates(linalg.hstack(*columns, rows=len(e.target.basis(k, tgt.work))))
    columns = [e.source.vector(pullback(e, rep), src.work) for rep in tgt.representative_cochains()]
    if not columns:
        return linalg.zeros(src.dim, 0)
    return src.coordinates(linalg.hstack(*columns, rows=len(e.source.basis(k, src.work))))


def support_map(c: CubicalComplex, k: int, s_from: SupportSystem, s_to: SupportSystem,
                flavor: str = "d") -> DomainMatrix:
    """Class-coordinate matrix of H^k_{s_from} -> H^k_{s_to} induced by C_{s_from} ⊆ C_{s_to}."""
    src = cohomology(c, k, s_from, flavor)
    tgt = cohomology(c, k, s_to, flavor)
    rows = c.basis_index(k, tgt.work)
    entries = {}
    for j, cell in enumerate(c.basis(k, src.work)):
        i = rows.get(cell)
        if i is None:
            raise SupportLeak(f"{cell} is allowed by {src.work.name} but not by {tgt.work.name}", cell=cell)
        entries[(i, j)] = 1
    inclusion = linalg.matrix(len(rows), len(c.basis(k, src.work)), entries)
    return class_matrix(src, tgt, inclusion)


# --- time integration, time extension and homotopies ---


def _spatial_support(s: SupportSystem) -> SupportSystem:
    return SupportSystem(Flag.FREE, s.space_flag)


def default_profile(c: SpacetimeComplex) -> dict[int, Fraction]:
    """Unit mass on the central interior time edge."""
    edges = c.interior_time_edges()
    return {edges[len(edges) // 2]: 1 / c.time.spacing}


def check_profile(c: SpacetimeComplex, profile: dict) -> dict[int, Fraction]:
    profile = {int(t): Fraction(a) for t, a in profile.items() if Fraction(a)}
    interior = set(c.interior_time_edges())
    outside = sorted(t for t in profile if t not in interior)
    if outside:
        raise BadProfile(f"profile touches time edges {outside} outside the interior {sorted(interior)}",
                         edges=outside)
    mass = sum(profile.values(), Fraction(0)) * c.time.spacing
    if mass != 1:
        raise BadProfile(f"profile mass is {mass}, expected 1", mass=mass)
    return profile


def time_integration_matrix(c: SpacetimeComplex, k: int, s: SupportSystem = TC) -> DomainMatrix:
    """i: C^k_s(M) -> C^{k-1}(Σ), i(ω) = (-1)^{k-1} Σ_t ω(e_t × ·)."""
    space_s = _spatial_support(s)
    rows = c.space.basis_index(k - 1, space_s)
    cols = c.basis(k, s)
    sign = -1 if (k - 1) % 2 else 1
    entries = {}
    for j, cell in enumerate(cols):
        if cell.dims[0]:
            entries[(rows[c.spatial_part(cell)], j)] = sign
    return linalg.matrix(len(rows), len(cols), entries)


def time_extension_matrix(c: SpacetimeComplex, p: int, profile: dict | None = None,
                          s: SupportSystem = TC) -> DomainMatrix:
    """e: C^p(Σ) -> C^{p+1}_s(M), e(φ) on e_t × ρ = (-1)^p a_t Δt φ(ρ)."""
    profile = check_profile(c, default_profile(c) if profile is None else profile)
    rows = c.basis_index(p + 1, s)
    cols = c.space.basis(p, _spatial_support(s))
    sign = -1 if p % 2 else 1
    entries = {}
    for j, sigma in enumerate(cols):
        for t, a in profile.items():
            entries[(rows[c.lift(sigma, 1, t)], j)] = sign * a * c.time.spacing
    return linalg.matrix(len(rows), len(cols), entries)


def _partial_sum_matrix(c: SpacetimeComplex, k: int, s: SupportSystem, coefficient) -> DomainMatrix:
    """Map dt-type components ψ_u to spatial-type components at v_t with weight coefficient(t, u)."""
    rows = c.basis_index(k - 1, s)
    cols = c.basis(k, s)
    entries = {}
    for j, cell in enumerate(cols):
        if not cell.dims[0]:
            continue
        u = cell.pos[0]
        rho = c.spatial_part(cell)
        for t in range(c.n_time + 1):
            value = coefficient(t, u)
            if not value:
                continue
            target = c.lift(rho, 0, t)
            i = rows.get(target)
            if i is None:
                raise SupportLeak(f"homotopy output is nonzero on {target} outside support {s.name}", cell=target)
            entries[(i, j)] = value
    return linalg.matrix(len(rows), len(cols), entries)


def homotopy_q_matrix(c: SpacetimeComplex, k: int, profile: dict | None = None,
                      s: SupportSystem = TC) -> DomainMatrix:
    """Q with e∘i - id = dQ + Qd: (Qω) at v_t = A(t)Ψ - S(t).

    A(t) = Σ_{u<t} a_u Δt, S(t) = Σ_{u<t} ψ_u and Ψ = Σ_u ψ_u.
    """
    profile = check_profile(c, default_profile(c) if profile is None else profile)
    cumulative = [Fraction(0)]
    for t in range(c.n_time):
        cumulative.append(cumulative[-1] + profile.get(t, 0) * c.time.spacing)
    return _partial_sum_matrix(c, k, s, lambda t, u: cumulative[t] - (1 if u < t else 0))


def homotopy_p_matrix(c: SpacetimeComplex, k: int, base: int | None = None, s: SupportSystem = SC) -> DomainMatrix:
    """P with π*s* - id = dP + Pd: (Pω) at v_t = -(S(t) - S(base))."""
    base = c.n_time // 2 if base is None else base
    return _partial_sum_matrix(c, k, s, lambda t, u: (1 if u < base else 0) - (1 if u < t else 0))


def slice_restriction_matrix(c: SpacetimeComplex, k: int, base: int | None = None,
                             s: SupportSystem = SC) -> DomainMatrix:
    """s*: C^k_s(M) -> C^k(Σ), restriction to the time vertex ``base``."""
    base = c.n_time // 2 if base is None else base
    rows = c.space.basis_index(k, _spatial_support(s))
    cols = c.basis(k, s)
    entries = {(rows[c.spatial_part(cell)], j): 1 for j, cell in enumerate(cols)
               if not cell.dims[0] and cell.pos[0] == base}
    return linalg.matrix(len(rows), len(cols), entries)


def projection_matrix(c: SpacetimeComplex, k: int, s: SupportSystem = SC) -> DomainMatrix:
    """π*: C^k(Σ) -> C^k_s(M), constant in time; needs a free time flag."""
    if s.time_flag != Flag.FREE:
        raise SupportLeak(f"time-constant cochains do not satisfy support {s.name}")
    rows = c.basis_index(k, s)
    cols = c.space.basis(k, _spatial_support(s))
    entries = {(rows[c.lift(sigma, 0, t)], j): 1 for j, sigma in enumerate(cols) for t in range(c.n_time + 1)}
    return linalg.matrix(len(rows), len(cols), entries)


def _apply(matrix: DomainMatrix, omega: Cochain, c_in: CubicalComplex, s_in: SupportSystem,
           c_out: CubicalComplex, k_out: int, s_out: SupportSystem) -> Cochain:
    return c_out.cochain(k_out, linalg.matmul(matrix, c_in.vector(omega, s_in)), s_out)


def time_integration(omega: Cochain, s: SupportSystem = TC) -> Cochain:
    c = omega.complex
    k = omega.degree
    return _apply(time_integration_matrix(c, k, s), omega, c, s, c.space, k - 1, _spatial_support(s))


def time_extension(phi: Cochain, c: SpacetimeComplex, profile: dict | None = None,
                   s: SupportSystem = TC) -> Cochain:
    p = phi.degree
    return _apply(time_extension_matrix(c, p, profile, s), phi, c.space, _spatial_support(s), c, p + 1, s)


def homotopy_Q(omega: Cochain, profile: dict | None = None, s: SupportSystem = TC) -> Cochain:
    c = omega.complex
    k = omega.degree
    if k == 0:
        return Cochain.zero(c, -1)
    return _apply(homotopy_q_matrix(c, k, profile, s), omega, c, s, c, k - 1, s)


def homotopy_P(omega: Cochain, base: int | None = None, s: SupportSystem = SC) -> Cochain:
    c = omega.complex
    k = omega.degree
    if k == 0:
        return Cochain.zero(c, -1)
    return _apply(homotopy_p_matrix(c, k, base, s), omega, c, s, c, k - 1, s)


def _homotopy_rhs(c: SpacetimeComplex, k: int, s: SupportSystem, h_k: DomainMatrix,
                  h_next: DomainMatrix | None) -> DomainMatrix:
    """dH + Hd on C^k_s for a degree-lowering H."""
    rhs = linalg.matmul(c.coboundary_matrix(k - 1, s), h_k)
    if h_next is not None:
        rhs = linalg.add(rhs, linalg.matmul(h_next, c.coboundary_matrix(k, s)))
    return rhs


def homotopy_identities(c: SpacetimeComplex, k: int, profile: dict | None = None,
                        base: int | None = None) -> dict:
    """Check e∘i - id = dQ + Qd on C^k_tc and π*s* - id = dP + Pd on C^k_sc as matrices."""
    n_tc = len(c.basis(k, TC))
    n_sc = len(c.basis(k, SC))
    if k > 0:
        q_k = homotopy_q_matrix(c, k, profile)
        p_k = homotopy_p_matrix(c, k, base)
        ei = linalg.matmul(time_extension_matrix(c, k - 1, profile), time_integration_matrix(c, k))
    else:
        q_k, p_k = linalg.zeros(0, n_tc), linalg.zeros(0, n_sc)
        ei = linalg.zeros(n_tc, n_tc)
    q_next = homotopy_q_matrix(c, k + 1, profile) if k < c.dim else None
    p_next = homotopy_p_matrix(c, k + 1, base) if k < c.dim else None
    lhs_q = linalg.sub(ei, linalg.identity(n_tc))
    pi_s = linalg.matmul(projection_matrix(c, k), slice_restriction_matrix(c, k, base))
    lhs_p = linalg.sub(pi_s, linalg.identity(n_sc))
    return {
        "k": k,
        "tc_homotopy": linalg.equal(lhs_q, _homotopy_rhs(c, k, TC, q_k, q_next)),
        "sc_homotopy": linalg.equal(lhs_p, _homotopy_rhs(c, k, SC, p_k, p_next)),
    }


def toolkit_isomorphisms(c: SpacetimeComplex, k: int, profile: dict | None = None,
                         base: int | None = None) -> dict:
    """Class matrices of i, e on tc-cohomology and of s*, π* on sc-cohomology, checked mutually inverse."""
    h_tc = cohomology(c, k, TC)
    h_sigma = cohomology(c.space, k - 1, FREE) if k > 0 else None
    out = {"k": k}
    if h_sigma is not None:
        i_cls = class_matrix(h_tc, h_sigma, time_integration_matrix(c, k))
        e_cls = class_matrix(h_sigma, h_tc, time_extension_matrix(c, k - 1, profile))
        out["tc_dims"] = [h_tc.dim, h_sigma.dim]
        out["tc_inverse"] = (linalg.equal(linalg.matmul(i_cls, e_cls), linalg.identity(h_sigma.dim))
                             and linalg.equal(linalg.matmul(e_cls, i_cls), linalg.identity(h_tc.dim)))
    else:
        out["tc_dims"] = [h_tc.dim, 0]
        out["tc_inverse"] = h_tc.dim == 0
    h_sc = cohomology(c, k, SC)
    h_sigma_c = cohomology(c.space, k, SupportSystem(Flag.FREE, Flag.COMPACT))
    s_cls = class_matrix(h_sc, h_sigma_c, slice_restriction_matrix(c, k, base))
    p_cls = class_matrix(h_sigma_c, h_sc, projection_matrix(c, k))
    out["sc_dims"] = [h_sc.dim, h_sigma_c.dim]
    out["sc_inverse"] = (linalg.equal(linalg.matmul(s_cls, p_cls), linalg.identity(h_sigma_c.dim))
                         and linalg.equal(linalg.matmul(p_cls, s_cls), linalg.identity(h_sc.dim)))
    return out


def one_sided_triviality(c: SpacetimeComplex, k: int) -> dict:
    """H^k vanishes for past- and future-compact supports, with explicit primitives.

    A closed cochain vanishing on the early stratum is d of -Pω with base
    slice 0, which vanishes there too; the late case uses base slice n.
    """
    out = {"k": k, "dims": {}, "primitives_ok": True, "checked": 0}
    for name in ("pc", "fc", "psc", "fsc"):
        s = SupportSystem.parse(name)
        out["dims"][name] = cohomology(c, k, s).dim
    for name, base in (("pc", 0), ("fc", c.n_time)):
        s = SupportSystem.parse(name)
        closed = linalg.kernel_basis(c.coboundary_matrix(k, s))
        if not closed.dim:
            continue
        if k == 0:
            out["primitives_ok"] = False
            continue
        p = homotopy_p_matrix(c, k, base, s)
        primitives = -linalg.matmul(p, closed.basis)
        out["checked"] += closed.dim
        if not linalg.equal(linalg.matmul(c.coboundary_matrix(k - 1, s), primitives), closed.basis):
            out["primitives_ok"] = False
    out["ok"] = out["primitives_ok"] and not any(out["dims"].values())
    return out


# --- dualities ---


_PAIRS = {"c-free": ("c", "free"), "free-c": ("free", "c"), "sc-tc": ("sc", "tc"), "tc-sc": ("tc", "sc")}


def duality_pairing_matrix(c: CubicalComplex, k: int, pair: str = "c-free",
                           flavors: tuple[str, str] = ("d", "d")) -> DomainMatrix:
    """Pairing matrix between complementary cohomologies.

    ``("d", "d")``: wedge pairing of H^k_{s1,d} against H^{m-k}_{s2,d}.
    ``("delta", "d")``: metric pairing of H^k_{s1,δ} against H^k_{s2,d}.
    Other flavor combinations are refused.
    """
    try:
        left_name, right_name = _PAIRS[pair]
    except KeyError:
        raise BadSpec(f"unknown duality pair {pair!r}; expected one of {', '.join(_PAIRS)}") from None
    s1, s2 = SupportSystem.parse(left_name), SupportSystem.parse(right_name)
    left_flavor, right_flavor = (_flavor(f) for f in flavors)
    if (left_flavor, right_flavor) == ("d", "d"):
        left, right = cohomology(c, k, s1), cohomology(c, c.dim - k, s2)
        from_pair = wedge_pairing
    elif (left_flavor, right_flavor) == ("delta", "d"):
        left, right = cohomology(c, k, s1, "delta"), cohomology(c, k, s2)
        if left.work != right.work:
            raise BadSpec(f"flavors {flavors} do not pair supports {pair}")
        from_pair = metric_pairing
    else:
        raise BadSpec(f"flavor combination {flavors} has no duality pairing")
    lefts, rights = left.representative_cochains(), right.representative_cochains()
    return linalg.matrix(len(lefts), len(rights),
                         {(i, j): from_pair(a, b) for i, a in enumerate(lefts) for j, b in enumerate(rights)})


# --- integer H¹ ---


@dataclass(frozen=True, eq=False)
class IntegerCohomologyLattice:
    """Integer H¹ classes in generator coordinates.

    ``generators`` are integer 1-cocycles (pulled back along the time
    projection on a spacetime) whose classes form a ZZ-basis of H¹(·, ZZ).
    Coordinates of a closed 1-cochain are taken against these generators, so
    the 2π-scaled lattice, written in units of π, is ``lattice`` = 2ZZ^b.
    """

    complex: CubicalComplex
    space: CohomologySpace
    generators: tuple[Cochain, ...]
    lattice: linalg.IntegerLattice
    _sigma_space: CohomologySpace
    _coords_to_generators: DomainMatrix

    @property
    def rank(self) -> int:
        return len(self.generators)

    def class_coordinates(self, omega: Cochain) -> tuple[Fraction, ...]:
        """Coordinates of a closed 1-cochain's class against ``generators``."""
        c = self.complex
        if isinstance(c, SpacetimeComplex):
            base = c.n_time // 2
            restricted = Cochain(c.space, 1, {c.spatial_part(cell): v for cell, v in omega.values.items()
                                              if not cell.dims[0] and cell.pos[0] == base})
            if not omega.d().is_zero():
                raise linalg.NotInSpan("cochain is not closed")
            omega = restricted
        sigma_coords = self._sigma_space.coordinates(self._sigma_space.complex.vector(omega))
        x = linalg.column_entries(linalg.matmul(self._coords_to_generators, sigma_coords))
        return tuple(x.get(i, Fraction(0)) for i in range(self.rank))

    def membership(self, omega: Cochain) -> linalg.Membership:
        """Is the class of ``omega`` (in units of π) in 2π·H¹(ZZ)?"""
        return linalg.lattice_membership(self.lattice, linalg.column(list(self.class_coordinates(omega))))


def _integer_kernel(m: DomainMatrix) -> DomainMatrix:
    """ZZ-basis (columns) of the integer kernel of an integer matrix."""
    rows, cols = m.shape
    if not cols:
        return linalg.zeros(0, 0, ZZ)
    if not rows:
        return linalg.identity(cols, ZZ)
    _, d, v = linalg.smith_normal_form(m)
    r = len([x for x in linalg.diagonal(d) if x])
    return linalg.select_cols(v, range(r, cols))


def integer_h1(c: CubicalComplex) -> IntegerCohomologyLattice:
    """H¹(·, ZZ) from the Smith normal form of the integer coboundary d⁰ of the Cauchy surface."""

    def build() -> IntegerCohomologyLattice:
        sigma = c.space if isinstance(c, SpacetimeComplex) else c
        d0 = sigma.coboundary_matrix(0).convert_to(ZZ)
        d1 = sigma.coboundary_matrix(1).convert_to(ZZ)
        n1 = d0.shape[0]
        u, d, _ = linalg.smith_normal_form(d0)
        divisors = [int(x) for x in linalg.diagonal(d) if x]
        if any(x != 1 for x in divisors):
            raise TorsionDetected(f"coboundary d⁰ has elementary divisors {divisors}", divisors=divisors)
        r = len(divisors)
        u_inv = u.convert_to(QQ).to_dense().inv().to_sparse().convert_to(ZZ)
        complement = linalg.select_cols(u_inv, range(r, n1))
        kernel = _integer_kernel(linalg.matmul(d1, complement)) if d1.shape[0] else \
            linalg.identity(n1 - r, ZZ)
        z = linalg.matmul(complement, kernel).convert_to(QQ) if kernel.shape[1] else linalg.zeros(n1, 0)
        sigma_space = cohomology(sigma, 1, FREE)
        b = z.shape[1]
        if b != sigma_space.dim:
            raise TorsionDetected(f"integer H¹ has rank {b} but dim H¹ = {sigma_space.dim}")
        gen_coords = sigma_space.coordinates(z) if b else linalg.zeros(0, 0)
        to_generators = gen_coords.to_dense().inv().to_sparse() if b else linalg.zeros(0, 0)
        sigma_gens = sigma.cochains(1, z)
        if isinstance(c, SpacetimeComplex):
            project = projection_matrix(c, 1, FREE)
            gens = tuple(c.cochains(1, linalg.matmul(project, z))) if b else ()
        else:
            gens = tuple(sigma_gens)
        lattice = linalg.IntegerLattice.from_basis(linalg.matrix(b, b, {(i, i): 2 for i in range(b)}, ZZ))
        logger.debug("integer H¹ of rank %d", b)
        return IntegerCohomologyLattice(c, cohomology(c, 1, FREE), gens, lattice, sigma_space, to_generators)

    return c.cached("integer_h1", build)
