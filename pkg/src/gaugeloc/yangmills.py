"""U(1) Yang–Mills on trivial bundles: gauge shifts, affine and character observables.

Connections are 1-cochains ℓ read in units of π (λ = πℓ) relative to the
zero reference connection. A gauge transformation shifts ℓ by an exact
cochain dχ plus an integer combination of 2·(integer H¹ generators), so
the topological part of the gauge-shift lattice is 2ZZ^b in generator
coordinates. Character values are phases π·(c + (φ, ℓ)) stored as their
rational coefficient modulo 2.
"""

import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction

from sympy.polys.domains import QQ, ZZ
from sympy.polys.matrices import DomainMatrix

from gaugeloc import ccr, linalg, maxwell
from gaugeloc.cohomology import IntegerCohomologyLattice, cohomology, integer_h1
from gaugeloc.complex import C, Cell, Cochain, Embedding, SpacetimeComplex, metric_pairing
from gaugeloc.errors import BadSpec, ComplexMismatch, NotInSpan, SupportLeak

logger = logging.getLogger(__name__)


def _scaled(m: DomainMatrix, factor) -> DomainMatrix:
    return linalg.matrix(m.shape[0], m.shape[1], {k: v * factor for k, v in linalg.entries(m).items()})


def _integral(m: DomainMatrix) -> bool:
    return all(v.denominator == 1 for v in linalg.entries(m).values())


def _mod2(x: Fraction) -> Fraction:
    return x - 2 * (x // 2)


# --- connections and gauge shifts ---


@dataclass(frozen=True, eq=False)
class Connection:
    """λ = π·value on the trivial bundle."""

    complex: SpacetimeComplex
    value: Cochain

    def __post_init__(self):
        if self.value.complex is not self.complex or self.value.degree != 1:
            raise BadSpec("a connection is a 1-cochain on its own complex")

    @classmethod
    def zero(cls, c: SpacetimeComplex) -> "Connection":
        return cls(c, Cochain.zero(c, 1))

    def shifted(self, shift: Cochain) -> "Connection":
        return Connection(self.complex, self.value + shift)

    def gauge_transform(self, shift: Cochain) -> "Connection":
        """λ ↦ λ - shift for a gauge-lattice member."""
        return Connection(self.complex, self.value - shift)


def curvature(conn: Connection) -> Cochain:
    """F(λ) = -dλ (units of π); the reference curvature is zero."""
    return -conn.value.d()


def holonomy(conn: Connection, axis: int, base: Cell) -> Fraction:
    """Sum of λ (units of π) around the circle ``axis`` through the vertex ``base``."""
    c = conn.complex
    circle = c.axes(base.component)[axis]
    if circle.kind != "circle":
        raise BadSpec(f"axis {axis} of component {base.component} is not a circle", axis=axis)
    dims = tuple(1 if i == axis else 0 for i in range(c.dim))
    total = Fraction(0)
    for j in range(circle.cells):
        pos = base.pos[:axis] + (j,) + base.pos[axis + 1:]
        total += conn.value.values.get(Cell(base.component, dims, pos), Fraction(0))
    return total


@dataclass(frozen=True)
class GaugeDecomposition:
    """shift = dχ + Σ 2·winding_i·generator_i, or the reason it is not a gauge shift."""

    member: bool
    chi: Cochain | None
    winding: tuple[int, ...]
    coordinates: tuple[Fraction, ...]
    reason: str = ""


@dataclass(frozen=True, eq=False)
class GaugeShiftLattice:
    complex: SpacetimeComplex
    exact_part: linalg.Subspace
    topological_part: IntegerCohomologyLattice

    @property
    def generators(self) -> tuple[Cochain, ...]:
        """The 2π-holonomy shifts 2·g_i."""
        return tuple(2 * g for g in self.topological_part.generators)

    def decompose(self, shift: Cochain) -> GaugeDecomposition:
        c = self.complex
        b = self.topological_part.rank
        if not shift.d().is_zero():
            return GaugeDecomposition(False, None, (), (), "shift is not closed, so it changes the curvature")
        coords = self.topological_part.class_coordinates(shift)
        membership = self.topological_part.membership(shift)
        if not membership.member:
            return GaugeDecomposition(False, None, (), coords,
                                      f"class coordinates {membership.coordinates} are not integers")
        winding = tuple(int(x) for x in membership.coordinates)
        residual = shift
        for n, g in zip(winding, self.generators):
            residual = residual - n * g
        chi = linalg.solve(c.coboundary_matrix(0), c.vector(residual))
        logger.debug("gauge shift with winding %s over %d generators", winding, b)
        return GaugeDecomposition(True, c.cochain(0, chi), winding, coords)

    def contains(self, shift: Cochain) -> bool:
        return self.decompose(shift).member


def gauge_lattice(c: SpacetimeComplex) -> GaugeShiftLattice:
    def build() -> GaugeShiftLattice:
        return GaugeShiftLattice(c, linalg.span(c.coboundary_matrix(0)), integer_h1(c))

    return c.cached("gauge_lattice", build)


def aharonov_bohm(c: SpacetimeComplex, index: int = 0, holonomy_pi: Fraction = Fraction(1)) -> Connection:
    """Flat connection ``holonomy_pi``·g_index, a gauge orbit of its own unless holonomy_pi is even."""
    gens = integer_h1(c).generators
    if not 0 <= index < len(gens):
        raise BadSpec(f"the complex has {len(gens)} integer H¹ generators, not {index + 1}")
    return Connection(c, Fraction(holonomy_pi) * gens[index])


# --- affine observables ---


def _random_exact_shift(c: SpacetimeComplex, rng: random.Random) -> Cochain:
    chi = Cochain(c, 0, {cell: Fraction(rng.randint(-4, 4), rng.randint(1, 3))
                         for cell in rng.sample(c.cells[0], min(4, len(c.cells[0])))})
    return chi.d()


@dataclass(frozen=True, eq=False)
class AffineObservable:
    """O(λ) = constant + (linear, λ) in units of π, with δ(certificate) = linear."""

    constant: Fraction
    linear: Cochain
    certificate: Cochain

    def __post_init__(self):
        if self.certificate.delta() != self.linear:
            raise BadSpec("the coexactness certificate does not reproduce the linear part")

    @property
    def complex(self) -> SpacetimeComplex:
        return self.linear.complex

    def value(self, conn: Connection) -> Fraction:
        return self.constant + metric_pairing(self.linear, conn.value)

    def verify_invariance(self, lattice: GaugeShiftLattice, seed: int = 0) -> bool:
        """Exact invariance under every lattice generator and a random exact shift."""
        shifts = list(lattice.generators) + [_random_exact_shift(self.complex, random.Random(seed))]
        return all(metric_pairing(self.linear, g) == 0 for g in shifts)


def curvature_dual(beta: Cochain) -> AffineObservable:
    """F*(β): λ ↦ (β, F(λ)), linear part -δβ."""
    c = beta.complex
    if beta.degree != 2:
        raise BadSpec("F* takes a 2-cochain")
    c.vector(beta, C)
    return AffineObservable(Fraction(0), -beta.delta(), -beta)


def mw_dual(alpha: Cochain) -> AffineObservable:
    """MW*(α) = F*(dα), linear part -δdα; it vanishes on every solution."""
    c = alpha.complex
    if alpha.degree != 1:
        raise BadSpec("MW* takes a 1-cochain")
    c.vector(alpha, C)
    return curvature_dual(alpha.d())


def coexact_subspace(c: SpacetimeComplex) -> linalg.Subspace:
    """δ(C_c²) ∩ C_c¹ in compact coordinates."""

    def build() -> linalg.Subspace:
        delta = linalg.matmul(c.codifferential_matrix(2), maxwell.inclusion(c, 2, C))
        inside, outside = maxwell._split_rows(c, 1, C)
        stays = linalg.kernel_basis(linalg.select_rows(delta, outside))
        return linalg.span(linalg.matmul(linalg.select_rows(delta, inside), stays.basis))

    return c.cached("coexact", build)


def _closed_compact_curvatures(c: SpacetimeComplex) -> linalg.Subspace:
    """δβ for closed compact β with δβ compact, in compact 1-cochain coordinates."""
    incl = maxwell.inclusion(c, 2, C)
    delta = linalg.matmul(c.codifferential_matrix(2), incl)
    inside, outside = maxwell._split_rows(c, 1, C)
    betas = linalg.kernel_basis(linalg.vstack(c.coboundary_matrix(2, C), linalg.select_rows(delta, outside),
                                              cols=incl.shape[1]))
    return linalg.span(linalg.matmul(linalg.select_rows(delta, inside), betas.basis))


@dataclass(frozen=True, eq=False)
class AffineObservableSpace:
    """Linear parts of gauge-invariant affine observables modulo MW*(C_c¹).

    Constants are central and pair to zero with everything; they are left out
    of the coordinates.
    """

    complex: SpacetimeComplex
    inv: linalg.Subspace
    van: linalg.Subspace
    quotient: linalg.QuotientMap
    gram: DomainMatrix
    radical: linalg.Subspace
    curvature_radical: linalg.Subspace
    psv0: linalg.QuotientMap
    report: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.quotient.dim

    def coordinates(self, vectors: DomainMatrix) -> DomainMatrix:
        self.inv.coordinates(vectors)
        return self.quotient(vectors)

    def observable(self, coords, constant=0) -> AffineObservable:
        """The affine observable with the given quotient coordinates and its δ-certificate."""
        c = self.complex
        vec = linalg.matmul(self.quotient.representatives, linalg.column(coords))
        full = linalg.matmul(maxwell.inclusion(c, 1, C), vec)
        eta = linalg.solve(linalg.matmul(c.codifferential_matrix(2), maxwell.inclusion(c, 2, C)), full)
        return AffineObservable(Fraction(constant), c.cochain(1, full), c.cochain(2, eta, C))


def affine_obs_space(c: SpacetimeComplex) -> AffineObservableSpace:
    """Inv (coexact compact linear parts) / Van with τ, its radical and the PSV⁰ quotient."""

    def build() -> AffineObservableSpace:
        inv = coexact_subspace(c)
        van = maxwell.vanishing_subspace(c, 1, C)
        quotient = linalg.quotient_coordinates(van, inv)
        op = maxwell.build_dalembert(c, 1)
        reps = linalg.matmul(maxwell.inclusion(c, 1, C), quotient.representatives)
        gram = linalg.matmul(linalg.matmul(reps.transpose(), c.gram(1)), maxwell.propagator_matrix(op, reps))
        radical = linalg.kernel_basis(gram)
        curv = _closed_compact_curvatures(c)
        curv_coords = linalg.span(quotient(curv.basis)) if curv.dim else linalg.zero_subspace(quotient.dim)
        psv0 = linalg.quotient_coordinates(curv_coords, linalg.span(linalg.identity(quotient.dim)))
        agree = curv_coords.dim == radical.dim and (not radical.dim or radical.contains(curv_coords.basis))
        report = {
            "dim": quotient.dim,
            "radical_dim": radical.dim,
            "curvature_radical_dim": curv_coords.dim,
            "radical_is_curvature": agree,
            "psv0_dim": psv0.dim,
        }
        logger.debug("affine observables: %s", report)
        return AffineObservableSpace(c, inv, van, quotient, gram, radical, curv_coords, psv0, report)

    return c.cached("affine_obs", build)


def affine_map(e: Embedding) -> DomainMatrix:
    """Induced map of affine observable coordinates along ``e``."""
    src, tgt = affine_obs_space(e.source), affine_obs_space(e.target)
    images = linalg.matmul(maxwell.compact_pushforward(e, 1), src.quotient.representatives)
    try:
        return tgt.coordinates(images)
    except NotInSpan:
        raise BadSpec(f"pushed affine observables of {e.name!r} are not coexact in the target") from None


def psv0_locality(e: Embedding) -> dict:
    """Kernel of the affine observable map and injectivity after the PSV⁰ quotient."""
    src, tgt = affine_obs_space(e.source), affine_obs_space(e.target)
    mapping = affine_map(e)
    reduced = linalg.matmul(tgt.psv0.matrix, linalg.matmul(mapping, src.psv0.representatives))
    rank = linalg.rank(reduced)
    out = {
        "embedding": e.name,
        "kernel_dim": linalg.kernel_basis(mapping).dim,
        "psv0_dim": src.psv0.dim,
        "psv0_rank": rank,
        "psv0_injective": rank == src.psv0.dim,
    }
    out["ok"] = out["psv0_injective"]
    return out


def flat_insensitivity(space: AffineObservableSpace, conn: Connection) -> bool:
    """Every Inv observable takes the same value on ``conn`` and on the reference when ``conn`` is flat."""
    c = space.complex
    values = linalg.matmul(linalg.matmul(maxwell.inclusion(c, 1, C), space.inv.basis).transpose(),
                           linalg.matmul(c.gram(1), c.vector(conn.value)))
    return linalg.is_zero(values)


# --- affine characters ---


def _generator_matrix(c: SpacetimeComplex) -> DomainMatrix:
    gens = integer_h1(c).generators
    n = len(c.cells[1])
    return linalg.hstack(*(c.vector(g) for g in gens), rows=n) if gens else linalg.zeros(n, 0)


@dataclass(frozen=True, eq=False)
class AffineCharacter:
    """λ ↦ exp(iπ(constant + (linear, λ))) for a compact coclosed ``linear``.

    ``periods`` are the pairings of ``linear`` with the integer H¹ generators;
    the character is gauge invariant exactly when they are integers.
    """

    constant: Fraction
    linear: Cochain
    periods: tuple[Fraction, ...]

    @classmethod
    def from_linear(cls, linear: Cochain, constant=0) -> "AffineCharacter":
        c = linear.complex
        if not linear.delta().is_zero():
            raise BadSpec("a character's linear part must be coclosed")
        c.vector(linear, C)
        periods = tuple(metric_pairing(linear, g) for g in integer_h1(c).generators)
        return cls(_mod2(Fraction(constant)), linear, periods)

    @property
    def complex(self) -> SpacetimeComplex:
        return self.linear.complex

    @property
    def gauge_invariant(self) -> bool:
        return all(p.denominator == 1 for p in self.periods)

    def phase(self, conn: Connection) -> Fraction:
        """Phase of the character value in units of π, in [0, 2)."""
        return _mod2(self.constant + metric_pairing(self.linear, conn.value))

    def __add__(self, other: "AffineCharacter") -> "AffineCharacter":
        return AffineCharacter(_mod2(self.constant + other.constant), self.linear + other.linear,
                               tuple(a + b for a, b in zip(self.periods, other.periods)))

    def verify_invariance(self, lattice: GaugeShiftLattice, seed: int = 0) -> bool:
        """Phase shifts by lattice generators lie in 2ZZ and exact shifts leave the phase alone."""
        exact = _random_exact_shift(self.complex, random.Random(seed))
        return (metric_pairing(self.linear, exact) == 0
                and all(metric_pairing(self.linear, g) % 2 == 0 for g in lattice.generators))


def dual_characters(c: SpacetimeComplex) -> list[AffineCharacter]:
    """Characters φ_i with (φ_i, g_j) = δ_ij; each detects holonomy in the i-th generator."""

    def build() -> list[AffineCharacter]:
        gens = _generator_matrix(c)
        b = gens.shape[1]
        if not b:
            return []
        inv = maxwell.coclosed_subspace(c, 1, C)
        basis = linalg.matmul(maxwell.inclusion(c, 1, C), inv.basis)
        periods = linalg.matmul(linalg.matmul(gens.transpose(), c.gram(1)), basis)
        y = linalg.solve(periods, linalg.identity(b))
        return [AffineCharacter.from_linear(phi) for phi in c.cochains(1, linalg.matmul(basis, y))]

    return c.cached("dual_characters", build)


@dataclass(frozen=True)
class GaugeEquivalent:
    decomposition: GaugeDecomposition


@dataclass(frozen=True)
class Separated:
    """A gauge-invariant character with different phases on the two connections."""

    character: AffineCharacter
    values: tuple[Fraction, Fraction]
    kind: str

    @property
    def phase_difference(self) -> Fraction:
        return _mod2(self.values[1] - self.values[0])


def separate_connections(first: Connection, second: Connection) -> GaugeEquivalent | Separated:
    """Gauge equivalence witness, or a character telling the two connections apart."""
    c = first.complex
    if second.complex is not c:
        raise ComplexMismatch("connections live on different complexes")
    diff = second.value - first.value
    decomposition = gauge_lattice(c).decompose(diff)
    if decomposition.member:
        return GaugeEquivalent(decomposition)

    if diff.d().is_zero():
        odd = next(i for i, x in enumerate(decomposition.coordinates) if x.denominator != 1 or x.numerator % 2)
        character = dual_characters(c)[odd]
        kind = "holonomy"
    else:
        inv = coexact_subspace(c)
        basis = linalg.matmul(maxwell.inclusion(c, 1, C), inv.basis)
        readings = linalg.column_entries(linalg.matmul(linalg.matmul(basis.transpose(), c.gram(1)), c.vector(diff)))
        if not readings:
            raise SupportLeak("the curvature difference lives on the window strata; enlarge the window")
        j = min(readings)
        phi = c.cochain(1, linalg.select_cols(basis, [j]))
        character = AffineCharacter.from_linear((1 / readings[j]) * phi)
        kind = "curvature"
    return Separated(character, (character.phase(first), character.phase(second)), kind)


# --- the character group ---


@dataclass(frozen=True, eq=False)
class CharacterObservableGroup:
    """Characters in Maxwell observable coordinates (k = 1) with pairing τ/h in units of π.

    ``periods`` (b x dim) sends observable coordinates to pairings with the
    integer H¹ generators; the group is {x : periods·x integral}.
    """

    complex: SpacetimeComplex
    h: Fraction
    observables: maxwell.MaxwellObservables
    periods: DomainMatrix
    expcnt: DomainMatrix
    expcnt_classes: DomainMatrix
    report: dict

    def tau(self, x: DomainMatrix, y: DomainMatrix) -> Fraction:
        value = linalg.matmul(linalg.matmul(x.transpose(), self.observables.gram), y)
        return linalg.entries(value).get((0, 0), Fraction(0)) / self.h

    def in_group(self, x: DomainMatrix) -> bool:
        return _integral(linalg.matmul(self.periods, x))

    def group_basis(self) -> tuple[list[str], DomainMatrix, list[bool]]:
        """Labels, observable-coordinate columns and divisibility of a basis of the group.

        The period duals span the ZZ part; the periods' kernel is the divisible part.
        """
        d = self.observables.dim
        b = self.periods.shape[0]
        labels, cols, divisible = [], [], []
        if b:
            dual = linalg.solve(self.periods, linalg.identity(b))
            for i in range(b):
                labels.append(f"dual{i}")
                cols.append(linalg.select_cols(dual, [i]))
                divisible.append(False)
        free = linalg.kernel_basis(self.periods) if b else linalg.span(linalg.identity(d))
        for i in range(free.dim):
            labels.append(f"free{i}")
            cols.append(linalg.select_cols(free.basis, [i]))
            divisible.append(True)
        return labels, linalg.hstack(*cols, rows=d), divisible

    def quantizable_generators(self) -> tuple[list[str], DomainMatrix, list[bool]]:
        """The group basis followed by the expcnt columns."""
        labels, cols, divisible = self.group_basis()
        for i in range(self.expcnt.shape[1]):
            labels.append(f"center{i}")
            cols = linalg.hstack(cols, linalg.select_cols(self.expcnt, [i]), rows=self.observables.dim)
            divisible.append(False)
        return labels, cols, divisible

    def presymplectic_group(self, centre: bool = True) -> tuple[ccr.PresymplecticGroup, DomainMatrix]:
        """The group with ρ = τ/h on its generators, and the generator columns.

        Cached per complex, coupling and generating set.
        """
        def build():
            labels, cols, divisible = self.quantizable_generators() if centre else self.group_basis()
            gram = linalg.matmul(linalg.matmul(cols.transpose(), self.observables.gram), cols)
            pairing = linalg.matrix(len(labels), len(labels),
                                    {k: v / self.h for k, v in linalg.entries(gram).items()})
            return ccr.PresymplecticGroup.from_gram(labels, pairing, divisible), cols

        return self.complex.cached(("character_group", self.h, centre), build)

    def group_element(self, x: DomainMatrix) -> ccr.Element:
        """Coordinates of the observable column ``x`` on the group basis; GroupMismatch outside the group."""
        group, cols = self.presymplectic_group(centre=False)
        coords = linalg.column_entries(linalg.solve(cols, x))
        return group.element(coords.get(i, Fraction(0)) for i in range(group.rank))


def _integral_preimage_basis(m: DomainMatrix) -> DomainMatrix:
    """ZZ-basis (columns) of {y : m y integral} for a rational m of full column rank."""
    r = m.shape[1]
    if not r:
        return linalg.zeros(0, 0)
    scale = linalg.lcm_denominator(linalg.entries(m).values())
    scaled = linalg.matrix(m.shape[0], r, {k: v * scale for k, v in linalg.entries(m).items()}, ZZ)
    _, d, v = linalg.smith_normal_form(scaled)
    divisors = [int(x) for x in linalg.diagonal(d)]
    if len([x for x in divisors if x]) != r:
        raise ArithmeticError("the integrality conditions do not have full column rank")
    weights = linalg.matrix(r, r, {(i, i): Fraction(scale, divisors[i]) for i in range(r)})
    return linalg.matmul(v.convert_to(QQ), weights)


def character_obs_space(c: SpacetimeComplex, h=1) -> CharacterObservableGroup:
    """exprad (the Maxwell radical) and expcnt = {x : τ(x, ·)/h ∈ 2ZZ on the group}.

    x is central when τ(x, ·) vanishes on the periods' kernel, i.e.
    gram·x = periodsᵀ·z, and then τ(x, y) = -zᵀ·periods·y, so the centre
    condition is z ∈ 2h·ZZ^b together with x itself lying in the group.
    """
    h = Fraction(h)
    if h <= 0:
        raise BadSpec(f"the coupling h must be positive, got {h}")

    def build() -> CharacterObservableGroup:
        obs = maxwell.observables(c, 1)
        d = obs.dim
        gens = _generator_matrix(c)
        b = gens.shape[1]
        reps = linalg.matmul(maxwell.inclusion(c, 1, C), obs.representatives)
        periods = linalg.matmul(linalg.matmul(gens.transpose(), c.gram(1)), reps) if b else linalg.zeros(0, d)

        joint = linalg.kernel_basis(linalg.hstack(obs.gram, -periods.transpose(), rows=d))
        z_part = linalg.select_rows(joint.basis, range(d, d + b))
        _, picks, _ = linalg.rref(z_part)
        xs = linalg.select_cols(linalg.select_rows(joint.basis, range(d)), picks)
        zs = linalg.select_cols(z_part, picks)
        conditions = linalg.vstack(
            linalg.matrix(b, len(picks), {k: v / (2 * h) for k, v in linalg.entries(zs).items()}),
            linalg.matmul(periods, xs), cols=len(picks))
        lattice = _integral_preimage_basis(conditions)
        expcnt = linalg.matmul(xs, lattice)
        classes = linalg.matmul(zs, lattice)
        halves = [_integral(linalg.matmul(conditions, _scaled(linalg.select_cols(lattice, [i]), Fraction(1, 2))))
                  for i in range(lattice.shape[1])]
        flux = maxwell.radical(obs)
        report = {
            "h": h,
            "dim_obs": d,
            "h1_rank": b,
            "exprad_dim": obs.radical.dim,
            "exprad_cohomology_check": flux["ok"],
            "expcnt_rank": expcnt.shape[1],
            "expcnt_classes": [tuple(linalg.column_entries(classes, i).get(j, Fraction(0)) for j in range(b))
                               for i in range(classes.shape[1])],
            "half_generator_member": any(halves),
            "van_annihilates_solutions": maxwell.solution_space(c, 1).report["van_annihilates_solutions"],
        }
        report["ok"] = (report["exprad_cohomology_check"] and not report["half_generator_member"]
                        and report["van_annihilates_solutions"])
        logger.debug("character observables: %s", report)
        return CharacterObservableGroup(c, h, obs, periods, expcnt, classes, report)

    return c.cached(("characters", h), build)


def _scaled_into_group(periods: DomainMatrix, x: DomainMatrix) -> DomainMatrix:
    scale = linalg.lcm_denominator(linalg.entries(linalg.matmul(periods, x)).values())
    return _scaled(x, scale)


def ym_locality_audit(f: Embedding, g: Embedding, h=1) -> dict:
    """Character kernels along both legs and the normalized no-go witness.

    The witness x is killed along ``g``; its image along ``f`` pairs with a
    group element y of the target to exactly π, outside 2πZZ, so no quotient
    can keep the image while killing x.
    """
    h = Fraction(h)
    kernels = {e.name: maxwell.locality_kernel(e, 1) for e in (f, g)}
    out = {
        "kernels": {name: r["kernel_dim"] for name, r in kernels.items()},
        "cohomology_kernels": {name: r["cohomology_kernel_dim"] for name, r in kernels.items()},
        "found": False,
    }
    witness = maxwell.no_go_witness(f, g, 1)
    if witness["found"]:
        target = character_obs_space(f.target, h)
        source = character_obs_space(f.source, h)
        x = linalg.column(list(witness["witness"]))
        partner = _scaled_into_group(target.periods, linalg.column(
            {witness["partner"]: 1}, target.observables.dim))
        image = linalg.matmul(maxwell.observable_map(f, 1), x)
        value = target.tau(image, partner)
        x = _scaled(x, 1 / value)
        image = linalg.matmul(maxwell.observable_map(f, 1), x)
        out.update({
            "found": True,
            "witness": tuple(linalg.column_entries(x).get(i, Fraction(0)) for i in range(x.shape[0])),
            "witness_in_group": source.in_group(x),
            "partner": tuple(linalg.column_entries(partner).get(i, Fraction(0)) for i in range(partner.shape[0])),
            "pairing_pi": target.tau(image, partner),
        })
    out["ok"] = all(k["ok"] for k in kernels.values()) and (
        not out["found"] or (out["witness_in_group"] and out["pairing_pi"] % 2 == 1))
    return out


def charge_observables(conn: Connection) -> dict:
    """Magnetic and electric flux tables of the curvature (units of π).

    Magnetic entries pair F with the compact δ-classes and vanish because F is
    exact; electric entries pair F with the compact d-classes in degree 2.
    ``on_shell`` asks δF = 0 away from the outermost vertex and edge slices.
    """
    c = conn.complex
    f = curvature(conn)
    magnetic = [metric_pairing(f, rep) for rep in cohomology(c, 2, C, "delta").representative_cochains()]
    electric_reps = cohomology(c, 2, C).representative_cochains()
    electric = [metric_pairing(f, rep) for rep in electric_reps]
    n = c.n_time
    ends = {(0, 0), (1, 0), (0, n), (1, n - 1)}
    on_shell = all((cell.dims[0], cell.pos[0]) in ends for cell in f.delta().support)
    return {"magnetic": magnetic, "electric": electric, "on_shell": on_shell,
            "magnetic_zero": not any(magnetic), "flat": f.is_zero()}


def on_shell_connections(c: SpacetimeComplex) -> list[Connection]:
    """Connections Gθ for the timelike-compact Maxwell source classes."""
    return [Connection(c, field_) for field_ in maxwell.solution_space(c, 1).field_cochains()]


def character_morphism(e: Embedding, h=1) -> ccr.PresymplecticMorphism:
    """The character group map along ``e`` on the group bases of both ends.

    NotPresymplectic when the observable map leaves the target group or
    does not preserve ρ.
    """
    h = Fraction(h)
    source, target = character_obs_space(e.source, h), character_obs_space(e.target, h)
    group_m, cols_m = source.presymplectic_group(centre=False)
    group_n, cols_n = target.presymplectic_group(centre=False)
    images = linalg.matmul(maxwell.observable_map(e, 1), cols_m)
    return ccr.PresymplecticMorphism(group_m, group_n, linalg.solve(cols_n, images))


def ym_isotony_quotient(regions: list[Embedding], inclusions=(), h=1) -> dict:
    """Isotony for the character groups: quotient each by its kernel towards the common target.

    Kernels are taken inside the group, in group-basis coordinates, and split
    into a ZZ part (directions with nonzero periods) and a divisible part.
    These are the rank drops of the lattice and of the divisible summand.
    """
    if len({id(e.target) for e in regions}) > 1:
        raise ComplexMismatch("isotony needs every region in the same target")
    h = Fraction(h)
    quotients = []
    rows = []
    for e in regions:
        morphism = character_morphism(e, h)
        b = character_obs_space(e.source, h).report["h1_rank"]
        rank = morphism.source.rank
        kernel = linalg.kernel_basis(morphism.matrix)
        lattice = linalg.rank(linalg.select_rows(kernel.basis, range(b))) if b and kernel.dim else 0
        q = linalg.quotient_coordinates(kernel, linalg.span(linalg.identity(rank)))
        quotients.append(q)
        rows.append({
            "region": e.name,
            "rank": rank,
            "h1_rank": b,
            "kernel_dim": kernel.dim,
            "kernel_lattice_rank": lattice,
            "kernel_divisible_dim": kernel.dim - lattice,
            "quotient_lattice_rank": b - lattice,
            "quotient_divisible_dim": rank - b - kernel.dim + lattice,
            "injective": linalg.rank(linalg.matmul(morphism.matrix, q.representatives)) == q.dim,
        })
    nested = []
    for inner, outer, emb in inclusions:
        mapped = linalg.matmul(quotients[outer].matrix,
                               linalg.matmul(character_morphism(emb, h).matrix, quotients[inner].representatives))
        nested.append({"inner": regions[inner].name, "outer": regions[outer].name,
                       "injective": linalg.rank(mapped) == quotients[inner].dim})
    logger.debug("character isotony over %d regions: %s", len(regions), [r["kernel_dim"] for r in rows])
    return {"layer": "character", "h": h, "regions": rows, "nested": nested,
            "ok": all(r["injective"] for r in rows) and all(r["injective"] for r in nested)}
