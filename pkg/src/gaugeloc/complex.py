"""Cubical spatial and spacetime complexes, cochains, d, δ, pairings, supports and embeddings."""

import itertools
import logging
import threading
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import NamedTuple

from sympy.polys.matrices import DomainMatrix

from gaugeloc import linalg
from gaugeloc.errors import BadSpec, ComplexMismatch, DegreeMismatch, SupportLeak

logger = logging.getLogger(__name__)

INTERVAL = "interval"
CIRCLE = "circle"


# --- axes and cells ---


@dataclass(frozen=True)
class AxisSpec:
    kind: str
    cells: int
    spacing: Fraction = Fraction(1)
    signature: int = 1

    def validate(self, where: str) -> None:
        if self.kind not in (INTERVAL, CIRCLE):
            raise BadSpec(f"{where}: unknown axis kind {self.kind!r}", axis=where)
        if self.kind == INTERVAL and self.cells < 1:
            raise BadSpec(f"{where}: an interval needs at least 1 cell", axis=where)
        if self.kind == CIRCLE and self.cells < 3:
            raise BadSpec(f"{where}: a circle needs at least 3 cells", axis=where)
        if Fraction(self.spacing) <= 0:
            raise BadSpec(f"{where}: spacing must be positive", axis=where)
        if self.signature not in (1, -1):
            raise BadSpec(f"{where}: signature must be +1 or -1", axis=where)

    @property
    def vertex_count(self) -> int:
        return self.cells + 1 if self.kind == INTERVAL else self.cells

    def upper(self, pos: int) -> int:
        """Vertex index of the upper endpoint of edge ``pos``."""
        return (pos + 1) % self.cells if self.kind == CIRCLE else pos + 1


def Interval(cells: int, spacing=1) -> AxisSpec:
    return AxisSpec(INTERVAL, cells, Fraction(spacing))


def Circle(cells: int, spacing=1) -> AxisSpec:
    return AxisSpec(CIRCLE, cells, Fraction(spacing))


def Time(cells: int, spacing=1) -> AxisSpec:
    return AxisSpec(INTERVAL, cells, Fraction(spacing), -1)


class Cell(NamedTuple):
    """A cube: ``dims[i]`` is 1 when the cell spans axis i; ``pos`` indexes the vertex or edge."""

    component: int
    dims: tuple[int, ...]
    pos: tuple[int, ...]

    @property
    def degree(self) -> int:
        return sum(self.dims)


@dataclass(frozen=True)
class SpatialComponent:
    axes: tuple[AxisSpec, ...]
    deleted: frozenset = field(default_factory=frozenset)


# --- support systems ---


class Flag(Enum):
    FREE = "free"
    COMPACT = "compact"
    PAST = "past"
    FUTURE = "future"


_DUAL_FLAG = {Flag.FREE: Flag.COMPACT, Flag.COMPACT: Flag.FREE, Flag.PAST: Flag.FUTURE, Flag.FUTURE: Flag.PAST}


@dataclass(frozen=True)
class SupportSystem:
    time_flag: Flag
    space_flag: Flag

    @property
    def name(self) -> str:
        for name, s in SUPPORTS.items():
            if s == self:
                return name
        return f"{self.time_flag.value}/{self.space_flag.value}"

    def dual(self) -> "SupportSystem":
        """The support whose δ-complex computes this support's δ-cohomology."""
        return SupportSystem(_DUAL_FLAG[self.time_flag], _DUAL_FLAG[self.space_flag])

    @classmethod
    def parse(cls, name: str) -> "SupportSystem":
        try:
            return SUPPORTS[name.lower()]
        except KeyError:
            raise BadSpec(f"unknown support system {name!r}; expected one of {', '.join(SUPPORTS)}") from None


C = SupportSystem(Flag.COMPACT, Flag.COMPACT)
TC = SupportSystem(Flag.COMPACT, Flag.FREE)
SC = SupportSystem(Flag.FREE, Flag.COMPACT)
FREE = SupportSystem(Flag.FREE, Flag.FREE)
PC = SupportSystem(Flag.PAST, Flag.FREE)
FC = SupportSystem(Flag.FUTURE, Flag.FREE)

SUPPORTS = {"c": C, "tc": TC, "sc": SC, "free": FREE, "pc": PC, "fc": FC,
            "psc": SupportSystem(Flag.PAST, Flag.COMPACT), "fsc": SupportSystem(Flag.FUTURE, Flag.COMPACT)}


# --- complexes ---


class CubicalComplex:
    """Surviving cells of a disjoint union of cubical boxes with deleted top cells.

    A cell survives iff it is a face of a surviving top cell. Cells of each
    degree are kept in sorted order, which fixes every basis used downstream.
    """

    def __init__(self, components: list[tuple[tuple[AxisSpec, ...], frozenset]]):
        if not components:
            raise BadSpec("a complex needs at least one component")
        dims = {len(axes) for axes, _ in components}
        if len(dims) != 1:
            raise BadSpec(f"components have different dimensions: {sorted(dims)}")
        self.dim = dims.pop()
        self._axes = [tuple(axes) for axes, _ in components]
        survivors: set[Cell] = set()
        for ci, (axes, deleted) in enumerate(components):
            for i, axis in enumerate(axes):
                axis.validate(f"component {ci} axis {i}")
            for pos in deleted:
                if len(pos) != self.dim or any(not 0 <= p < a.cells for p, a in zip(pos, axes)):
                    raise BadSpec(f"component {ci}: deleted top cell {pos} is out of range", cell=pos)
            for pos in itertools.product(*(range(a.cells) for a in axes)):
                if tuple(pos) in deleted:
                    continue
                survivors.update(self.closure(Cell(ci, (1,) * self.dim, tuple(pos))))
        self.cells: list[list[Cell]] = [sorted(c for c in survivors if c.degree == k) for k in range(self.dim + 1)]
        self.index: list[dict[Cell, int]] = [{c: i for i, c in enumerate(cs)} for cs in self.cells]
        self._memo: dict = {}
        self._lock = threading.Lock()
        logger.debug("built complex with cell counts %s", [len(cs) for cs in self.cells])

    # --- combinatorics ---

    @property
    def components(self) -> int:
        return len(self._axes)

    def axes(self, component: int = 0) -> tuple[AxisSpec, ...]:
        return self._axes[component]

    def boundary(self, cell: Cell) -> list[tuple[Cell, int]]:
        """Faces of codimension one with their cubical incidence signs."""
        axes = self._axes[cell.component]
        out = []
        before = 0
        for i, spans in enumerate(cell.dims):
            if not spans:
                continue
            sign = -1 if before % 2 else 1
            dims = cell.dims[:i] + (0,) + cell.dims[i + 1:]
            lower = Cell(cell.component, dims, cell.pos)
            upper_pos = cell.pos[:i] + (axes[i].upper(cell.pos[i]),) + cell.pos[i + 1:]
            out.append((Cell(cell.component, dims, upper_pos), sign))
            out.append((lower, -sign))
            before += 1
        return out

    def closure(self, cell: Cell) -> list[Cell]:
        """All faces of ``cell``, itself included."""
        axes = self._axes[cell.component]
        choices = []
        for i, spans in enumerate(cell.dims):
            if spans:
                p = cell.pos[i]
                choices.append([(1, p), (0, p), (0, axes[i].upper(p))])
            else:
                choices.append([(0, cell.pos[i])])
        return [Cell(cell.component, tuple(d for d, _ in pick), tuple(p for _, p in pick))
                for pick in itertools.product(*choices)]

    def vertices(self, cell: Cell) -> list[Cell]:
        return [f for f in self.closure(cell) if not f.degree]

    def cofaces(self, cell: Cell) -> list[Cell]:
        """Surviving cells having ``cell`` as a codimension-one face."""
        k = cell.degree

        def build() -> dict:
            table: dict = {}
            if k < self.dim:
                for upper in self.cells[k + 1]:
                    for face, _ in self.boundary(upper):
                        table.setdefault(face, []).append(upper)
            return table

        return self.cached(("cofaces", k), build).get(cell, [])

    def top_cells(self) -> list[Cell]:
        return self.cells[self.dim]

    def cached(self, key, build):
        """Memoize ``build()`` on this complex under ``key``.

        The lock is not held while building, so builds may nest across
        complexes; two threads racing on one key keep the first result.
        """
        with self._lock:
            if key in self._memo:
                return self._memo[key]
        value = build()
        with self._lock:
            return self._memo.setdefault(key, value)

    # --- metric ---

    def weight(self, cell: Cell) -> Fraction:
        """Lorentz sign times Π spacing over vertex axes / Π spacing over edge axes."""
        w = Fraction(1)
        for spans, axis in zip(cell.dims, self._axes[cell.component]):
            if spans:
                w /= axis.spacing
                if axis.signature < 0:
                    w = -w
            else:
                w *= axis.spacing
        return w

    # --- supports ---

    def vanishing_cells(self, s: SupportSystem) -> frozenset:
        raise NotImplementedError

    def basis(self, k: int, s: SupportSystem = FREE) -> list[Cell]:
        """Cells of degree k on which cochains of support ``s`` may be nonzero."""

        def build() -> list[Cell]:
            if not 0 <= k <= self.dim:
                return []
            dead = self.vanishing_cells(s)
            return [c for c in self.cells[k] if c not in dead]

        return self.cached(("basis", k, s), build)

    def basis_index(self, k: int, s: SupportSystem = FREE) -> dict[Cell, int]:
        return self.cached(("basis_index", k, s), lambda: {c: i for i, c in enumerate(self.basis(k, s))})

    # --- operators ---

    def coboundary_matrix(self, k: int, s: SupportSystem = FREE) -> DomainMatrix:
        """d: C^k_s -> C^{k+1}_s, rows indexed by ``basis(k+1, s)``."""

        def build() -> DomainMatrix:
            rows = self.basis_index(k + 1, s)
            cols = self.basis_index(k, s)
            entries = {}
            for cell, r in rows.items():
                for face, sign in self.boundary(cell):
                    j = cols.get(face)
                    if j is not None:
                        entries[(r, j)] = entries.get((r, j), 0) + sign
            return linalg.matrix(len(rows), len(cols), entries)

        return self.cached(("d", k, s), build)

    def gram(self, k: int, s: SupportSystem = FREE) -> DomainMatrix:
        """Diagonal matrix of the metric pairing on C^k_s."""

        def build() -> DomainMatrix:
            cells = self.basis(k, s)
            return linalg.matrix(len(cells), len(cells), {(i, i): self.weight(c) for i, c in enumerate(cells)})

        return self.cached(("gram", k, s), build)

    def gram_inverse(self, k: int, s: SupportSystem = FREE) -> DomainMatrix:
        def build() -> DomainMatrix:
            cells = self.basis(k, s)
            return linalg.matrix(len(cells), len(cells), {(i, i): 1 / self.weight(c) for i, c in enumerate(cells)})

        return self.cached(("gram_inv", k, s), build)

    def codifferential_matrix(self, k: int, s: SupportSystem = FREE) -> DomainMatrix:
        """δ: C^k_s -> C^{k-1}_s, the metric adjoint G⁻¹ dᵀ G inside C_s."""

        def build() -> DomainMatrix:
            d = self.coboundary_matrix(k - 1, s)
            return linalg.matmul(linalg.matmul(self.gram_inverse(k - 1, s), d.transpose()), self.gram(k, s))

        return self.cached(("delta", k, s), build)

    def dalembert_matrix(self, k: int) -> DomainMatrix:
        """□ = δd + dδ on unrestricted k-cochains."""

        def build() -> DomainMatrix:
            dd = linalg.matmul(self.codifferential_matrix(k + 1), self.coboundary_matrix(k))
            if k > 0:
                dd = linalg.add(dd, linalg.matmul(self.coboundary_matrix(k - 1), self.codifferential_matrix(k)))
            return dd

        return self.cached(("box", k), build)

    # --- cochain <-> vector ---

    def vector(self, omega: "Cochain", s: SupportSystem = FREE) -> DomainMatrix:
        """Column vector of ``omega`` over ``basis(k, s)``; SupportLeak if it does not satisfy s."""
        if omega.complex is not self:
            raise ComplexMismatch("cochain lives on another complex")
        index = self.basis_index(omega.degree, s)
        values = {}
        for cell, value in omega.values.items():
            i = index.get(cell)
            if i is None:
                raise SupportLeak(f"cochain is nonzero on {cell}, outside support {s.name}", cell=cell)
            values[i] = value
        return linalg.column(values, len(index))

    def cochain(self, k: int, vector: DomainMatrix, s: SupportSystem = FREE) -> "Cochain":
        cells = self.basis(k, s)
        return Cochain(self, k, {cells[i]: v for i, v in linalg.column_entries(vector).items()})

    def cochains(self, k: int, vectors: DomainMatrix, s: SupportSystem = FREE) -> list["Cochain"]:
        return [self.cochain(k, v, s) for v in linalg.columns(vectors)]

    def euler_characteristic(self, s: SupportSystem = FREE) -> int:
        return sum((-1) ** k * len(self.basis(k, s)) for k in range(self.dim + 1))


class SpatialComplex(CubicalComplex):
    """A Cauchy-surface stand-in: a disjoint union of cubical boxes with holes."""

    def __init__(self, components: list[SpatialComponent]):
        super().__init__([(tuple(c.axes), frozenset(tuple(p) for p in c.deleted)) for c in components])
        self.spec = tuple(components)
        for axes in self._axes:
            for i, axis in enumerate(axes):
                if axis.signature != 1:
                    raise BadSpec(f"spatial axis {i} must have signature +1", axis=i)
        self._check_connected()
        self.boundary_cells = self._boundary_stratum()

    def _check_connected(self) -> None:
        for ci in range(self.components):
            tops = [c for c in self.top_cells() if c.component == ci]
            if not tops:
                raise BadSpec(f"component {ci} has no surviving top cell", component=ci)
            seen = {tops[0]}
            queue = deque([tops[0]])
            while queue:
                cell = queue.popleft()
                for face, _ in self.boundary(cell):
                    for other in self.cofaces(face):
                        if other not in seen:
                            seen.add(other)
                            queue.append(other)
            if len(seen) != len(tops):
                raise BadSpec(f"deletions disconnect component {ci}; model the pieces as separate components",
                              component=ci)

    def _boundary_stratum(self) -> frozenset:
        out: set[Cell] = set()
        if self.dim == 0:
            return frozenset()
        for cell in self.cells[self.dim - 1]:
            if len(self.cofaces(cell)) == 1:
                out.update(self.closure(cell))
        return frozenset(out)

    def vanishing_cells(self, s: SupportSystem) -> frozenset:
        return self.boundary_cells if s.space_flag == Flag.COMPACT else frozenset()

    def distance_from(self, cells) -> dict[Cell, int]:
        """Graph distance on the 1-skeleton from the vertex closure of ``cells``."""
        dist = {v: 0 for cell in cells for v in self.vertices(cell)}
        queue = deque(dist)
        while queue:
            u = queue.popleft()
            for e in self.cofaces(u):
                for w in self.vertices(e):
                    if w not in dist:
                        dist[w] = dist[u] + 1
                        queue.append(w)
        return dist

    def cell_distance(self, a: Cell, b: Cell) -> float:
        """Smallest vertex-graph distance between the closures of two cells."""
        dist = self.distance_from([a])
        return min((dist[v] for v in self.vertices(b) if v in dist), default=float("inf"))


class SpacetimeComplex(CubicalComplex):
    """Time interval (axis 0, signature -1) times a spatial complex.

    ``margin`` is the number of time slices at each end forming the time
    stratum on which time-compact cochains vanish.
    """

    def __init__(self, time: AxisSpec, space: SpatialComplex, margin: int = 2):
        time.validate("time axis")
        if time.kind != INTERVAL or time.signature != -1:
            raise BadSpec("the time axis must be an interval with signature -1", axis="time")
        if margin < 1 or 2 * margin > time.cells + 1:
            raise BadSpec(f"margin {margin} does not fit {time.cells} time cells", axis="time")
        self.time = time
        self.space = space
        self.margin = margin
        n = time.cells
        super().__init__([((time,) + tuple(c.axes), frozenset((t,) + tuple(p) for t in range(n) for p in c.deleted))
                          for c in space.spec])
        if self.dim < 2:
            raise BadSpec("spacetime dimension must be at least 2")
        self.time_strata = {"past": self._time_stratum(early=True), "future": self._time_stratum(early=False)}
        self.space_stratum = frozenset(c for k in range(self.dim + 1) for c in self.cells[k]
                                       if self.spatial_part(c) in space.boundary_cells)

    @property
    def n_time(self) -> int:
        return self.time.cells

    def _time_stratum(self, early: bool) -> frozenset:
        n, mu = self.time.cells, self.margin

        def inside(t: int) -> bool:
            return t <= mu - 1 if early else t >= n - mu + 1

        out = set()
        for cs in self.cells:
            for c in cs:
                t = c.pos[0]
                if inside(t) and (not c.dims[0] or inside(t + 1)):
                    out.add(c)
        return frozenset(out)

    def vanishing_cells(self, s: SupportSystem) -> frozenset:
        def build() -> frozenset:
            dead = set()
            if s.time_flag in (Flag.COMPACT, Flag.PAST):
                dead |= self.time_strata["past"]
            if s.time_flag in (Flag.COMPACT, Flag.FUTURE):
                dead |= self.time_strata["future"]
            if s.space_flag == Flag.COMPACT:
                dead |= self.space_stratum
            return frozenset(dead)

        return self.cached(("dead", s), build)

    # --- time/space split ---

    @staticmethod
    def spatial_part(cell: Cell) -> Cell:
        return Cell(cell.component, cell.dims[1:], cell.pos[1:])

    @staticmethod
    def lift(spatial: Cell, time_dim: int, t: int) -> Cell:
        return Cell(spatial.component, (time_dim,) + spatial.dims, (t,) + spatial.pos)

    def slice_cells(self, k: int, time_dim: int, t: int) -> list[Cell]:
        """Degree-k cells whose time part is vertex t (time_dim 0) or edge t (time_dim 1)."""
        if not 0 <= k - time_dim <= self.space.dim:
            return []
        return [self.lift(sc, time_dim, t) for sc in self.space.cells[k - time_dim]]

    def interior_time_edges(self) -> list[int]:
        """Time edges outside both time strata."""
        return list(range(self.margin - 1, self.time.cells - self.margin + 1))

    def causal_shadow(self, cells, direction: str = "both") -> frozenset:
        """Cells reachable from ``cells`` at one spatial step per time slice.

        ``direction`` is ``"future"``, ``"past"`` or ``"both"``; time is measured by
        the lower time vertex of each cell.
        """
        by_time: dict[int, list[Cell]] = {}
        for src in cells:
            by_time.setdefault(src.pos[0], []).append(self.spatial_part(src))
        fronts = {t: self.space.distance_from(spatial) for t, spatial in by_time.items()}
        out = set()
        for k in range(self.dim + 1):
            for target in self.cells[k]:
                t1 = target.pos[0]
                verts = self.space.vertices(self.spatial_part(target))
                for t0, dist in fronts.items():
                    dt = t1 - t0
                    if direction == "future" and dt < 0 or direction == "past" and dt > 0:
                        continue
                    if any(dist.get(v, abs(dt) + 1) <= abs(dt) for v in verts):
                        out.add(target)
                        break
        return frozenset(out)


def build_complex(spec) -> SpacetimeComplex:
    """Build a spacetime complex from a mapping.

    ``spec`` keys: ``time`` (``{"cells": n, "spacing": "1"}``), optional
    ``margin``, and ``components``: a list of ``{"axes": [{"kind", "cells",
    "spacing"}], "deleted": [[...], ...]}``.
    """
    try:
        time_spec = spec["time"]
        time = Time(int(time_spec["cells"]), Fraction(str(time_spec.get("spacing", 1))))
        components = []
        for comp in spec["components"]:
            axes = tuple(AxisSpec(a["kind"], int(a["cells"]), Fraction(str(a.get("spacing", 1))))
                         for a in comp["axes"])
            components.append(SpatialComponent(axes, frozenset(tuple(p) for p in comp.get("deleted", []))))
        margin = int(spec.get("margin", 2))
    except (KeyError, TypeError, ValueError) as exc:
        raise BadSpec(f"malformed complex specification: {exc}") from exc
    return SpacetimeComplex(time, SpatialComplex(components), margin)


# --- cochains ---


@dataclass(frozen=True, eq=False)
class Cochain:
    complex: CubicalComplex
    degree: int
    values: dict

    def __post_init__(self):
        clean = {}
        index = self.complex.index[self.degree] if 0 <= self.degree <= self.complex.dim else {}
        for cell, value in self.values.items():
            if cell not in index:
                raise DegreeMismatch(f"{cell} is not a degree-{self.degree} cell of the complex", cell=cell)
            value = Fraction(value)
            if value:
                clean[cell] = value
        object.__setattr__(self, "values", clean)

    @classmethod
    def zero(cls, c: CubicalComplex, k: int) -> "Cochain":
        return cls(c, k, {})

    @classmethod
    def indicator(cls, c: CubicalComplex, cell: Cell, value=1) -> "Cochain":
        return cls(c, cell.degree, {cell: value})

    @classmethod
    def constant(cls, c: CubicalComplex, k: int, value=1) -> "Cochain":
        return cls(c, k, {cell: value for cell in c.cells[k]})

    @property
    def support(self) -> frozenset:
        return frozenset(self.values)

    def is_zero(self) -> bool:
        return not self.values

    def satisfies(self, s: SupportSystem) -> bool:
        return not (self.support & self.complex.vanishing_cells(s))

    def _check(self, other: "Cochain") -> None:
        if other.complex is not self.complex:
            raise ComplexMismatch("cochains live on different complexes")
        if other.degree != self.degree:
            raise DegreeMismatch(f"degrees {self.degree} and {other.degree} differ")

    def __add__(self, other: "Cochain") -> "Cochain":
        self._check(other)
        out = dict(self.values)
        for cell, v in other.values.items():
            out[cell] = out.get(cell, 0) + v
        return Cochain(self.complex, self.degree, out)

    def __neg__(self) -> "Cochain":
        return Cochain(self.complex, self.degree, {c: -v for c, v in self.values.items()})

    def __sub__(self, other: "Cochain") -> "Cochain":
        return self + (-other)

    def __rmul__(self, scalar) -> "Cochain":
        return Cochain(self.complex, self.degree, {c: scalar * v for c, v in self.values.items()})

    def __eq__(self, other) -> bool:
        return (isinstance(other, Cochain) and other.complex is self.complex
                and other.degree == self.degree and other.values == self.values)

    def __hash__(self):
        return hash((id(self.complex), self.degree, frozenset(self.values.items())))

    def d(self) -> "Cochain":
        c = self.complex
        return c.cochain(self.degree + 1, linalg.matmul(c.coboundary_matrix(self.degree), c.vector(self)))

    def delta(self) -> "Cochain":
        c = self.complex
        if self.degree == 0:
            return Cochain.zero(c, -1)
        return c.cochain(self.degree - 1, linalg.matmul(c.codifferential_matrix(self.degree), c.vector(self)))

    def box(self) -> "Cochain":
        c = self.complex
        return c.cochain(self.degree, linalg.matmul(c.dalembert_matrix(self.degree), c.vector(self)))


def coboundary_matrix(c: CubicalComplex, k: int, s: SupportSystem = FREE) -> DomainMatrix:
    return c.coboundary_matrix(k, s)


def codifferential_matrix(c: CubicalComplex, k: int, s: SupportSystem = FREE) -> DomainMatrix:
    return c.codifferential_matrix(k, s)


def metric_pairing(alpha: Cochain, beta: Cochain) -> Fraction:
    """(α, β) = Σ ε(σ) w(σ) α(σ) β(σ)."""
    alpha._check(beta)
    c = alpha.complex
    small, big = sorted((alpha.values, beta.values), key=len)
    return sum((c.weight(cell) * v * big[cell] for cell, v in small.items() if cell in big), Fraction(0))


def cup_product(alpha: Cochain, beta: Cochain, cell: Cell) -> Fraction:
    """Cubical cup product (α ∪ β) evaluated on ``cell``.

    Sum over the ways of splitting the spanned axes into a front block J
    (|J| = deg α, remaining axes at their lower vertex) and a back block
    (J axes at their upper vertex), signed by the shuffle of (J, Jᶜ).
    """
    c = alpha.complex
    axes = c.axes(cell.component)
    spanned = [i for i, d in enumerate(cell.dims) if d]
    p = alpha.degree
    total = Fraction(0)
    for front_axes in itertools.combinations(spanned, p):
        front_set = set(front_axes)
        back_axes = [i for i in spanned if i not in front_set]
        inversions = sum(1 for i in back_axes for j in front_axes if i < j)
        a = alpha.values.get(Cell(cell.component, tuple(1 if i in front_set else 0 for i in range(len(axes))),
                                  cell.pos))
        if not a:
            continue
        back_pos = tuple(axes[i].upper(x) if i in front_set else x for i, x in enumerate(cell.pos))
        back_dims = tuple(1 if i in back_axes else 0 for i in range(len(axes)))
        b = beta.values.get(Cell(cell.component, back_dims, back_pos))
        if b:
            total += (-1) ** inversions * a * b
    return total


def wedge_pairing(alpha: Cochain, beta: Cochain) -> Fraction:
    """⟨α, β⟩ = Σ over surviving top cells of α ∪ β."""
    if alpha.complex is not beta.complex:
        raise ComplexMismatch("cochains live on different complexes")
    c = alpha.complex
    if alpha.degree + beta.degree != c.dim:
        raise DegreeMismatch(f"degrees {alpha.degree} + {beta.degree} != {c.dim}")
    return sum((cup_product(alpha, beta, top) for top in c.top_cells()), Fraction(0))


# --- embeddings ---


@dataclass(frozen=True)
class Embedding:
    """Injective, incidence-preserving cell map of ``source`` onto an open part of ``target``."""

    source: CubicalComplex
    target: CubicalComplex
    cell_map: dict
    collar_margin: int = 1
    name: str = ""

    def __post_init__(self):
        if self.collar_margin < 1:
            raise BadSpec("collar margin must be at least 1")
        images = set(self.cell_map.values())
        if len(images) != len(self.cell_map):
            raise BadSpec(f"embedding {self.name!r} is not injective")
        for k in range(self.source.dim + 1):
            for cell in self.source.cells[k]:
                image = self.cell_map.get(cell)
                if image is None or image not in self.target.index[k]:
                    raise BadSpec(f"embedding {self.name!r}: {cell} has no image cell in the target", cell=cell)
                mapped = sorted((self.cell_map[f], s) for f, s in self.source.boundary(cell))
                if mapped != sorted(self.target.boundary(image)):
                    raise BadSpec(f"embedding {self.name!r} breaks incidences at {cell}", cell=cell)

    @classmethod
    def translate(cls, source: CubicalComplex, target: CubicalComplex, placements, collar_margin: int = 1,
                  name: str = "") -> "Embedding":
        """Place each source component ``i`` at ``placements[i] = (target_component, offsets)``.

        ``offsets`` has one integer per axis (time first for spacetimes); circle
        axes of the target wrap modulo their cell count.
        """
        cell_map = {}
        for k in range(source.dim + 1):
            for cell in source.cells[k]:
                tc, offsets = placements[cell.component]
                axes = target.axes(tc)
                pos = tuple((p + o) % a.cells if a.kind == CIRCLE else p + o
                            for p, o, a in zip(cell.pos, offsets, axes))
                cell_map[cell] = Cell(tc, cell.dims, pos)
        return cls(source, target, cell_map, collar_margin, name)

    @classmethod
    def identity(cls, c: CubicalComplex) -> "Embedding":
        return cls(c, c, {cell: cell for cs in c.cells for cell in cs}, 1, "id")

    def compose(self, inner: "Embedding") -> "Embedding":
        """``self ∘ inner``."""
        if inner.target is not self.source:
            raise ComplexMismatch("embeddings do not compose")
        return Embedding(inner.source, self.target, {c: self.cell_map[v] for c, v in inner.cell_map.items()},
                         max(self.collar_margin, inner.collar_margin), f"{self.name}∘{inner.name}")

    @property
    def frontier(self) -> frozenset:
        """Source cells whose image has a target coface outside the image."""
        images = set(self.cell_map.values())
        return frozenset(c for c, img in self.cell_map.items()
                         if any(up not in images for up in self.target.cofaces(img)))

    @property
    def spatial_frontier(self) -> frozenset:
        """Frontier cells whose outside coface differs in a spatial direction."""
        images = set(self.cell_map.values())
        return frozenset(c for c, img in self.cell_map.items()
                         if any(up not in images and up.dims[0] == img.dims[0] for up in self.target.cofaces(img)))

    def collar(self) -> frozenset:
        layer = set(self.frontier)
        for _ in range(self.collar_margin - 1):
            verts = {v for cell in layer for v in self.source.vertices(cell)}
            star = {c for cs in self.source.cells for c in cs if verts & set(self.source.vertices(c))}
            layer = {f for c in star for f in self.source.closure(c)}
        return frozenset(layer)

    def spacings_match(self) -> bool:
        return all(self.source.weight(c) == self.target.weight(img) for c, img in self.cell_map.items())


def pushforward(e: Embedding, omega: Cochain, s: SupportSystem | None = None) -> Cochain:
    """Extension by zero; refuses cochains touching the collar of the image frontier."""
    if omega.complex is not e.source:
        raise ComplexMismatch("cochain does not live on the embedding source")
    if s is not None and not omega.satisfies(s):
        bad = sorted(omega.support & e.source.vanishing_cells(s))[0]
        raise SupportLeak(f"cochain is nonzero on {bad}, outside support {s.name}", cell=bad)
    leaks = omega.support & e.collar()
    if leaks:
        bad = sorted(leaks)[0]
        raise SupportLeak(f"cochain is nonzero on collar cell {bad} of embedding {e.name!r}", cell=bad)
    return Cochain(e.target, omega.degree, {e.cell_map[c]: v for c, v in omega.values.items()})


def pullback(e: Embedding, omega: Cochain) -> Cochain:
    if omega.complex is not e.target:
        raise ComplexMismatch("cochain does not live on the embedding target")
    return Cochain(e.source, omega.degree, {c: omega.values[img] for c, img in e.cell_map.items()
                                            if c.degree == omega.degree and img in omega.values})


def pushforward_matrix(e: Embedding, k: int, s_source: SupportSystem, s_target: SupportSystem) -> DomainMatrix:
    """Matrix of extension by zero from C^k_{s_source}(source) to C^k_{s_target}(target).

    Basis cells in the collar are mapped too; callers restrict to collar-free
    subspaces where the map is a cochain map.
    """
    rows = e.target.basis_index(k, s_target)
    cols = e.source.basis(k, s_source)
    entries = {}
    for j, cell in enumerate(cols):
        i = rows.get(e.cell_map[cell])
        if i is None:
            raise SupportLeak(f"{cell} maps outside support {s_target.name} of the target", cell=cell)
        entries[(i, j)] = 1
    return linalg.matrix(len(rows), len(cols), entries)
