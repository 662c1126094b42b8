"""Weyl (CCR) algebra of a presymplectic Abelian group with exact phases.

Pairings ρ are rational multiples of π and are stored as that rational. The
Weyl relation W_h W_k = exp(-(i/2)ρ(h, k)) W_{h+k} therefore only produces
roots of unity, and every coefficient is a finite rational combination of
them. The minimal regular C*-norm is not computed; for a symplectic group it
is the unique C*-norm and ‖·‖₁ bounds it.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction

import sympy
from sympy import Poly, cyclotomic_poly
from sympy.polys.matrices import DomainMatrix

from gaugeloc import linalg
from gaugeloc.errors import BadSpec, GroupMismatch, NotPresymplectic

logger = logging.getLogger(__name__)

_X = sympy.Symbol("x")


# --- exact roots of unity ---


def _reduce_phase(r: Fraction, q: Fraction) -> tuple[Fraction, Fraction]:
    """exp(iπr) with r in [0, 1), pushing a half turn into the sign of q."""
    r = r - 2 * (r // 2)
    if r >= 1:
        return r - 1, -q
    return r, q


@dataclass(frozen=True, eq=False)
class Cyclotomic:
    """Σ q·exp(iπr) with rational q and r; equality is decided in QQ(ζ)."""

    terms: tuple[tuple[Fraction, Fraction], ...] = ()

    @classmethod
    def of(cls, mapping) -> "Cyclotomic":
        merged: dict[Fraction, Fraction] = {}
        for r, q in dict(mapping).items():
            r, q = _reduce_phase(Fraction(r), Fraction(q))
            merged[r] = merged.get(r, Fraction(0)) + q
        return cls(tuple(sorted((r, q) for r, q in merged.items() if q)))

    @classmethod
    def phase(cls, r, q=1) -> "Cyclotomic":
        return cls.of({Fraction(r): Fraction(q)})

    @classmethod
    def rational(cls, q) -> "Cyclotomic":
        return cls.phase(0, q)

    def __add__(self, other: "Cyclotomic") -> "Cyclotomic":
        out = dict(self.terms)
        for r, q in other.terms:
            out[r] = out.get(r, Fraction(0)) + q
        return Cyclotomic.of(out)

    def __neg__(self) -> "Cyclotomic":
        return Cyclotomic(tuple((r, -q) for r, q in self.terms))

    def __sub__(self, other: "Cyclotomic") -> "Cyclotomic":
        return self + (-other)

    def __mul__(self, other) -> "Cyclotomic":
        if not isinstance(other, Cyclotomic):
            other = Cyclotomic.rational(other)
        out: dict[Fraction, Fraction] = {}
        for r1, q1 in self.terms:
            for r2, q2 in other.terms:
                r, q = _reduce_phase(r1 + r2, q1 * q2)
                out[r] = out.get(r, Fraction(0)) + q
        return Cyclotomic.of(out)

    __rmul__ = __mul__

    def conjugate(self) -> "Cyclotomic":
        return Cyclotomic.of({-r: q for r, q in self.terms})

    def is_zero(self) -> bool:
        if not self.terms:
            return True
        n = math.lcm(*(r.denominator for r, _ in self.terms))
        poly = Poly.from_dict({(int(r * n),): sympy.Rational(q.numerator, q.denominator) for r, q in self.terms},
                              _X, domain="QQ")
        return poly.rem(cyclotomic_poly(2 * n, _X, polys=True)).is_zero

    def __eq__(self, other) -> bool:
        if not isinstance(other, Cyclotomic):
            other = Cyclotomic.rational(other)
        return (self - other).is_zero()

    __hash__ = None

    def to_sympy(self) -> sympy.Expr:
        return sympy.Add(*(sympy.Rational(q.numerator, q.denominator) * sympy.exp(
            sympy.I * sympy.pi * sympy.Rational(r.numerator, r.denominator)) for r, q in self.terms))

    def abs_squared(self) -> sympy.Expr:
        """|c|² as an exact real sympy number."""
        square = self * self.conjugate()
        return sympy.Add(*(sympy.Rational(q.numerator, q.denominator) * sympy.cos(
            sympy.pi * sympy.Rational(r.numerator, r.denominator)) for r, q in square.terms))

    def __abs__(self) -> sympy.Expr:
        if len(self.terms) == 1:
            return sympy.Rational(abs(self.terms[0][1]))
        return sympy.sqrt(self.abs_squared())

    def render(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for r, q in self.terms:
            parts.append(str(q) if not r else f"{q}·exp(iπ·{r})")
        return " + ".join(parts)


# --- groups and elements ---


Element = tuple[Fraction, ...]


@dataclass(frozen=True, eq=False)
class PresymplecticGroup:
    """Free (or partly divisible) Abelian group on ``labels`` with ρ given on generators, in units of π.

    Elements are coordinate tuples over the generators; coordinates on
    divisible generators may be rational, the others must be integers.
    """

    labels: tuple[str, ...]
    pairing: tuple[tuple[Fraction, ...], ...]
    divisible: tuple[bool, ...] = field(default=())

    def __post_init__(self):
        n = len(self.labels)
        if not self.divisible:
            object.__setattr__(self, "divisible", (False,) * n)
        if len(self.pairing) != n or any(len(row) != n for row in self.pairing) or len(self.divisible) != n:
            raise BadSpec(f"pairing must be {n}x{n} with one divisibility flag per generator")
        for i in range(n):
            for j in range(n):
                if self.pairing[i][j] != -self.pairing[j][i]:
                    raise NotPresymplectic(f"pairing is not antisymmetric at ({self.labels[i]}, {self.labels[j]})")

    @classmethod
    def from_gram(cls, labels, gram: DomainMatrix, divisible=None) -> "PresymplecticGroup":
        n = len(labels)
        values = linalg.entries(gram)
        pairing = tuple(tuple(values.get((i, j), Fraction(0)) for j in range(n)) for i in range(n))
        return cls(tuple(labels), pairing, tuple(divisible or (False,) * n))

    @property
    def rank(self) -> int:
        return len(self.labels)

    @property
    def zero(self) -> Element:
        return (Fraction(0),) * self.rank

    def element(self, coords) -> Element:
        coords = tuple(Fraction(x) for x in coords)
        if len(coords) != self.rank:
            raise GroupMismatch(f"element has {len(coords)} coordinates, group rank is {self.rank}")
        for x, label, div in zip(coords, self.labels, self.divisible):
            if not div and x.denominator != 1:
                raise GroupMismatch(f"coordinate {x} on the non-divisible generator {label!r}")
        return coords

    def generator(self, i: int, scale=1) -> Element:
        return self.element(Fraction(scale) if j == i else 0 for j in range(self.rank))

    def rho(self, h: Element, k: Element) -> Fraction:
        return sum((h[i] * self.pairing[i][j] * k[j] for i in range(self.rank) for j in range(self.rank)
                    if h[i] and k[j]), Fraction(0))

    def W(self, h) -> "WeylElement":
        return WeylElement(self, {self.element(h): Cyclotomic.rational(1)})

    def unit(self) -> "WeylElement":
        return self.W(self.zero)


def _add(h: Element, k: Element) -> Element:
    return tuple(a + b for a, b in zip(h, k))


@dataclass(frozen=True, eq=False)
class WeylElement:
    """Finite combination Σ c_h W_h; zero coefficients are never stored."""

    group: PresymplecticGroup
    terms: dict

    def __post_init__(self):
        object.__setattr__(self, "terms", {h: c for h, c in self.terms.items() if not c.is_zero()})

    def _check(self, other: "WeylElement") -> None:
        if other.group is not self.group:
            raise GroupMismatch("Weyl elements of different groups")

    def __add__(self, other: "WeylElement") -> "WeylElement":
        self._check(other)
        out = dict(self.terms)
        for h, c in other.terms.items():
            out[h] = out[h] + c if h in out else c
        return WeylElement(self.group, out)

    def __neg__(self) -> "WeylElement":
        return WeylElement(self.group, {h: -c for h, c in self.terms.items()})

    def __sub__(self, other: "WeylElement") -> "WeylElement":
        return self + (-other)

    def __rmul__(self, scalar) -> "WeylElement":
        return WeylElement(self.group, {h: c * scalar for h, c in self.terms.items()})

    def __mul__(self, other: "WeylElement") -> "WeylElement":
        return weyl_product(self, other)

    def __eq__(self, other) -> bool:
        return isinstance(other, WeylElement) and other.group is self.group and (self - other).is_zero()

    __hash__ = None

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, h) -> Cyclotomic:
        return self.terms.get(tuple(Fraction(x) for x in h), Cyclotomic())


def weyl_product(a: WeylElement, b: WeylElement) -> WeylElement:
    """Bilinear extension of W_h W_k = exp(-(i/2)ρ(h, k)) W_{h+k}."""
    a._check(b)
    g = a.group
    out: dict = {}
    for h, c in a.terms.items():
        for k, d in b.terms.items():
            term = c * d * Cyclotomic.phase(-g.rho(h, k) / 2)
            key = _add(h, k)
            out[key] = out[key] + term if key in out else term
    return WeylElement(g, out)


def involution(a: WeylElement) -> WeylElement:
    """(Σ c_h W_h)* = Σ conj(c_h) W_{-h}."""
    return WeylElement(a.group, {tuple(-x for x in h): c.conjugate() for h, c in a.terms.items()})


def commutator(a: WeylElement, b: WeylElement) -> WeylElement:
    return weyl_product(a, b) - weyl_product(b, a)


def l1_norm(a: WeylElement) -> sympy.Expr:
    """‖Σ c_h W_h‖₁ = Σ |c_h|, exact (rational whenever every coefficient is a single phase)."""
    return sympy.Add(*(abs(c) for c in a.terms.values()))


def reference_state(a: WeylElement) -> Cyclotomic:
    """ω̃(W_0) = 1 and ω̃(W_h) = 0 for h ≠ 0."""
    return a.terms.get(a.group.zero, Cyclotomic())


def coefficient_square_sum(a: WeylElement) -> Cyclotomic:
    """Σ |c_h|², equal to ω̃(a*a)."""
    total = Cyclotomic()
    for c in a.terms.values():
        total = total + c * c.conjugate()
    return total


def state_bound_check(a: WeylElement) -> bool:
    """|ω̃(a)| ≤ ‖a‖₁."""
    return bool(abs(reference_state(a)) <= l1_norm(a))


# --- morphisms and the centre ---


@dataclass(frozen=True, eq=False)
class PresymplecticMorphism:
    """Group homomorphism given by ``matrix`` (target rank x source rank) on generator coordinates."""

    source: PresymplecticGroup
    target: PresymplecticGroup
    matrix: DomainMatrix

    def __post_init__(self):
        if self.matrix.shape != (self.target.rank, self.source.rank):
            raise BadSpec(f"morphism matrix has shape {self.matrix.shape}, expected "
                          f"{(self.target.rank, self.source.rank)}")
        images = [self(self.source.generator(i)) for i in range(self.source.rank)]
        for i in range(self.source.rank):
            for j in range(self.source.rank):
                if self.target.rho(images[i], images[j]) != self.source.pairing[i][j]:
                    raise NotPresymplectic(f"ρ({self.source.labels[i]}, {self.source.labels[j]}) is not preserved",
                                           generators=(i, j))

    def __call__(self, h) -> Element:
        image = linalg.column_entries(linalg.matmul(self.matrix, linalg.column(list(h))))
        try:
            return self.target.element(image.get(i, Fraction(0)) for i in range(self.target.rank))
        except GroupMismatch as exc:
            raise NotPresymplectic(f"the morphism leaves the target group: {exc}") from None

    def compose(self, inner: "PresymplecticMorphism") -> "PresymplecticMorphism":
        if inner.target is not self.source:
            raise GroupMismatch("morphisms do not compose")
        return PresymplecticMorphism(inner.source, self.target, linalg.matmul(self.matrix, inner.matrix))

    @classmethod
    def identity(cls, g: PresymplecticGroup) -> "PresymplecticMorphism":
        return cls(g, g, linalg.identity(g.rank))


def ccr_morphism(morphism: PresymplecticMorphism, a: WeylElement) -> WeylElement:
    """Δ(L): Σ c_h W_h ↦ Σ c_h W_{Lh}."""
    if a.group is not morphism.source:
        raise GroupMismatch("element does not belong to the morphism's source group")
    out: dict = {}
    for h, c in a.terms.items():
        key = morphism(h)
        out[key] = out[key] + c if key in out else c
    return WeylElement(morphism.target, out)


def separates_labels(morphism: PresymplecticMorphism, elements) -> bool:
    """Distinct elements keep distinct images, so Δ(L) stays injective on their span."""
    images = [morphism(h) for h in elements]
    return len(set(images)) == len(set(tuple(Fraction(x) for x in h) for h in elements))


def center_test(g: PresymplecticGroup, h) -> dict:
    """W_h is central iff ρ(h, k) ∈ 2ZZ (units of π) for every group element k.

    On a divisible generator every rational multiple counts, so ρ must vanish
    there. A failure names a witness w with ρ(h, w) ∉ 2ZZ and the nonzero
    commutator [W_h, W_w].
    """
    h = g.element(h)
    for i in range(g.rank):
        value = g.rho(h, g.generator(i))
        if g.divisible[i]:
            if not value:
                continue
            scale = 1 if value % 2 else 1 / value
        elif value % 2 == 0:
            continue
        else:
            scale = 1
        witness = g.generator(i, scale)
        comm = commutator(g.W(h), g.W(witness))
        logger.debug("W_%s is not central: ρ against %s is %s·π", h, g.labels[i], g.rho(h, witness))
        return {"central": False, "witness": g.labels[i], "witness_element": witness,
                "pairing_pi": g.rho(h, witness), "commutator_zero": comm.is_zero()}
    return {"central": True, "witness": None}
