"""Exact sparse linear algebra over QQ and ZZ: echelon forms, subspaces, quotients and lattices.

Matrices are sympy ``DomainMatrix`` objects in sparse format over ``QQ`` (or
``ZZ`` for lattice work). Vectors are single-column matrices; a family of
vectors is a matrix whose columns are the vectors.
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from sympy.polys.domains import QQ, ZZ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.normalforms import smith_normal_decomp

from gaugeloc.errors import NotASubspace, NotInSpan

logger = logging.getLogger(__name__)

RationalMatrix = DomainMatrix


# --- scalars ---


def qq(value):
    """Convert an int, Fraction, "p/q" string or QQ element to a QQ element."""
    if isinstance(value, str):
        value = Fraction(value)
    if isinstance(value, Fraction):
        return QQ(value.numerator, value.denominator)
    return QQ.convert(value)


def to_fraction(x) -> Fraction:
    return Fraction(int(x.numerator), int(x.denominator))


# --- construction helpers ---


def matrix(rows: int, cols: int, entries=None, domain=QQ) -> DomainMatrix:
    """Sparse matrix from a ``{(i, j): value}`` map; zero values are dropped."""
    dod: dict[int, dict[int, object]] = {}
    for (i, j), value in (entries or {}).items():
        x = ZZ(int(value)) if domain is ZZ else qq(value)
        if x:
            dod.setdefault(i, {})[j] = x
    return DomainMatrix.from_dod(dod, (rows, cols), domain)


def from_rows(rows: list[list], domain=QQ) -> DomainMatrix:
    n = len(rows)
    m = len(rows[0]) if rows else 0
    return matrix(n, m, {(i, j): v for i, row in enumerate(rows) for j, v in enumerate(row)}, domain)


def column(values, n: int | None = None) -> DomainMatrix:
    """Column vector from a list or a ``{index: value}`` map of length ``n``."""
    if isinstance(values, dict):
        return matrix(n, 1, {(i, 0): v for i, v in values.items()})
    return matrix(len(values), 1, {(i, 0): v for i, v in enumerate(values)})


def zeros(rows: int, cols: int, domain=QQ) -> DomainMatrix:
    return DomainMatrix.zeros((rows, cols), domain)


def identity(n: int, domain=QQ) -> DomainMatrix:
    return DomainMatrix.eye(n, domain).to_sparse()


def entries(m: DomainMatrix) -> dict[tuple[int, int], Fraction]:
    """Nonzero entries of ``m`` as ``{(i, j): Fraction}``."""
    return {(i, j): to_fraction(v) for i, row in m.to_dod().items() for j, v in row.items()}


def column_entries(m: DomainMatrix, j: int = 0) -> dict[int, Fraction]:
    return {i: to_fraction(row[j]) for i, row in m.to_dod().items() if j in row}


def columns(m: DomainMatrix) -> list[DomainMatrix]:
    return [m.extract(range(m.shape[0]), [j]) for j in range(m.shape[1])]


def hstack(*blocks: DomainMatrix, rows: int | None = None) -> DomainMatrix:
    """Horizontal concatenation tolerating zero-width blocks."""
    blocks = [b.to_sparse() for b in blocks if b.shape[1]]
    if not blocks:
        return zeros(rows or 0, 0)
    return blocks[0].hstack(*blocks[1:]) if len(blocks) > 1 else blocks[0]


def vstack(*blocks: DomainMatrix, cols: int | None = None) -> DomainMatrix:
    blocks = [b.to_sparse() for b in blocks if b.shape[0]]
    if not blocks:
        return zeros(0, cols or 0)
    return blocks[0].vstack(*blocks[1:]) if len(blocks) > 1 else blocks[0]


def select_rows(m: DomainMatrix, rows) -> DomainMatrix:
    rows = list(rows)
    if not rows or not m.shape[1]:
        return zeros(len(rows), m.shape[1], m.domain)
    return m.extract(rows, range(m.shape[1]))


def select_cols(m: DomainMatrix, cols) -> DomainMatrix:
    cols = list(cols)
    if not cols or not m.shape[0]:
        return zeros(m.shape[0], len(cols), m.domain)
    return m.extract(range(m.shape[0]), cols)


def selector(indices, n: int) -> DomainMatrix:
    """The ``len(indices) x n`` matrix picking the given coordinates."""
    return matrix(len(indices), n, {(r, i): 1 for r, i in enumerate(indices)})


def is_zero(m: DomainMatrix) -> bool:
    return not m.to_dod()


def equal(a: DomainMatrix, b: DomainMatrix) -> bool:
    """Exact equality regardless of storage format or ZZ/QQ domain."""
    if a.shape != b.shape:
        return False
    if not a.shape[0] or not a.shape[1]:
        return True
    return is_zero(sub(a.convert_to(QQ), b.convert_to(QQ)))


def diagonal(m: DomainMatrix) -> list:
    dod = m.to_dod()
    zero = m.domain.zero
    return [dod.get(i, {}).get(i, zero) for i in range(min(m.shape))]


def add(a: DomainMatrix, b: DomainMatrix) -> DomainMatrix:
    """Sparse sum; ``a + b`` on DomainMatrix would densify."""
    a, b = a.unify(b, fmt="sparse")
    return a.add(b)


def sub(a: DomainMatrix, b: DomainMatrix) -> DomainMatrix:
    a, b = a.unify(b, fmt="sparse")
    return a.sub(b)


_sub_matrices = sub  # quotient_coordinates shadows `sub` with a parameter


def matmul(a: DomainMatrix, b: DomainMatrix) -> DomainMatrix:
    """Sparse product tolerating empty inner or outer dimensions."""
    if not (a.shape[0] and a.shape[1] and b.shape[1]):
        return zeros(a.shape[0], b.shape[1], a.domain)
    a, b = a.unify(b, fmt="sparse")
    return a.matmul(b)


# --- echelon forms ---


def rref(m: DomainMatrix) -> tuple[int, tuple[int, ...], DomainMatrix]:
    """Reduced row echelon form over QQ.

    The RREF of a matrix is unique, so the pivot strategy used internally by
    sympy cannot change ``reduced``; only its zero rows are dropped here.
    """
    rows, cols = m.shape
    if not rows or not cols or is_zero(m):
        return 0, (), zeros(0, cols)
    reduced, pivots = m.to_sparse().convert_to(QQ).rref()
    pivots = tuple(pivots)
    return len(pivots), pivots, select_rows(reduced, range(len(pivots)))


def rank(m: DomainMatrix) -> int:
    return rref(m)[0]


@dataclass(frozen=True)
class Subspace:
    """A subspace of QQ^n held as the nonzero rows of its RREF.

    ``rows`` is ``dim x ambient_dim``; ``pivots[i]`` is the pivot column of row i.
    The basis vectors (``basis``, as columns) are therefore echelon with strictly
    increasing pivots, and coordinates of a member v are simply v[pivots].
    """

    ambient_dim: int
    rows: DomainMatrix
    pivots: tuple[int, ...]

    @property
    def dim(self) -> int:
        return len(self.pivots)

    @property
    def basis(self) -> DomainMatrix:
        return self.rows.transpose()

    def coordinates(self, vectors: DomainMatrix) -> DomainMatrix:
        """Coordinates in ``basis`` of the columns of ``vectors``; NotInSpan if any is outside."""
        vectors = vectors.convert_to(QQ).to_sparse()
        coords = select_rows(vectors, self.pivots)
        residual = sub(vectors, matmul(self.basis, coords)) if self.dim else vectors
        if not is_zero(residual):
            j = min(j for _, row in residual.to_dod().items() for j in row)
            raise NotInSpan(f"column {j} is not in the subspace", column=j)
        return coords

    def contains(self, vectors: DomainMatrix) -> bool:
        try:
            self.coordinates(vectors)
        except NotInSpan:
            return False
        return True


def span(vectors: DomainMatrix) -> Subspace:
    """Column span of ``vectors``."""
    n = vectors.shape[0]
    r, pivots, reduced = rref(vectors.transpose())
    return Subspace(n, reduced, pivots)


def zero_subspace(n: int) -> Subspace:
    return Subspace(n, zeros(0, n), ())


def kernel_basis(m: DomainMatrix) -> Subspace:
    """``{v : m v = 0}``; its dimension is ``cols - rank(m)``."""
    cols = m.shape[1]
    r, pivots, reduced = rref(m)
    dod = reduced.to_dod()
    free = [j for j in range(cols) if j not in set(pivots)]
    vecs: dict[tuple[int, int], object] = {}
    for c, f in enumerate(free):
        vecs[(f, c)] = 1
        for i, p in enumerate(pivots):
            value = dod.get(i, {}).get(f)
            if value:
                vecs[(p, c)] = -to_fraction(value)
    logger.debug("kernel of %dx%d matrix: rank %d, nullity %d", m.shape[0], cols, r, len(free))
    return span(matrix(cols, len(free), vecs))


def image_basis(m: DomainMatrix) -> Subspace:
    return span(m)


def subspace_sum(*spaces: Subspace) -> Subspace:
    n = spaces[0].ambient_dim
    return span(hstack(*(s.basis for s in spaces), rows=n))


def intersect(u: Subspace, w: Subspace) -> Subspace:
    """``u ∩ w`` from the kernel of ``[U | -W]``."""
    if not u.dim or not w.dim:
        return zero_subspace(u.ambient_dim)
    k = kernel_basis(hstack(u.basis, -w.basis))
    if not k.dim:
        return zero_subspace(u.ambient_dim)
    return span(matmul(u.basis, select_rows(k.basis, range(u.dim))))


def solve(a: DomainMatrix, b: DomainMatrix) -> DomainMatrix:
    """One solution X of ``a X = b`` (free variables set to zero); NotInSpan if inconsistent."""
    n = a.shape[1]
    r, pivots, reduced = rref(hstack(a, b, rows=a.shape[0]))
    if any(p >= n for p in pivots):
        raise NotInSpan("right-hand side is not in the column span", column=pivots[-1] - n)
    x: dict[tuple[int, int], Fraction] = {}
    for i, p in enumerate(pivots):
        for (_, j), v in entries(select_rows(reduced, [i])).items():
            if j >= n:
                x[(p, j - n)] = v
    return matrix(n, b.shape[1], x)


# --- quotients ---


@dataclass(frozen=True)
class QuotientMap:
    """Linear coordinates on ``big / sub``.

    ``matrix`` has shape ``dim x ambient_dim``; it is meaningful on vectors of
    ``big`` and sends every vector of ``sub`` to zero. ``representatives``
    holds one vector of ``big`` per quotient coordinate.
    """

    sub: Subspace
    big: Subspace
    matrix: DomainMatrix
    representatives: DomainMatrix

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __call__(self, vectors: DomainMatrix) -> DomainMatrix:
        return matmul(self.matrix, vectors)


def quotient_coordinates(sub: Subspace, big: Subspace) -> QuotientMap:
    """Coordinates on ``big / sub``; raises NotASubspace unless ``sub ⊆ big``."""
    if sub.dim and not big.contains(sub.basis):
        raise NotASubspace("sub is not contained in big")
    n = big.ambient_dim
    pick = selector(big.pivots, n)
    sub_in_big = matmul(pick, sub.basis) if sub.dim else zeros(big.dim, 0)
    s_rank, s_pivots, s_rows = rref(sub_in_big.transpose())
    free = [i for i in range(big.dim) if i not in set(s_pivots)]
    reduce = identity(big.dim)
    if s_rank:
        reduce = _sub_matrices(reduce, matmul(s_rows.transpose(), selector(s_pivots, big.dim)))
    qmat = matmul(select_rows(reduce, free), pick)
    reps = select_cols(big.basis, free)
    return QuotientMap(sub, big, qmat, reps)


# --- integer lattices ---


def smith_normal_form(m: DomainMatrix) -> tuple[DomainMatrix, DomainMatrix, DomainMatrix]:
    """``(U, D, V)`` with ``U m V = D``, U and V unimodular, d_i >= 0 and d_i | d_{i+1}.

    The certificate is re-verified by exact multiplication on every call.
    """
    m = m.convert_to(ZZ).to_dense()
    rows, cols = m.shape
    if not rows or not cols:
        return identity(rows, ZZ), zeros(rows, cols, ZZ), identity(cols, ZZ)
    d, u, v = smith_normal_decomp(m)
    d, u, v = d.to_sparse(), u.to_sparse(), v.to_sparse()
    flips = {}
    for i, x in enumerate(diagonal(d)):
        if x < 0:
            flips[(i, i)] = -1
    if flips:
        sign = matrix(rows, rows, {(i, i): flips.get((i, i), 1) for i in range(rows)}, ZZ)
        u = (sign * u).to_sparse()
        d = (sign * d).to_sparse()
    if not equal(matmul(matmul(u, m), v), d):
        raise ArithmeticError("Smith normal form certificate failed to verify")
    diag = [int(x) for x in diagonal(d)]
    nonzero = [x for x in diag if x]
    if any(b % a for a, b in zip(nonzero, nonzero[1:])) or any(diag[len(nonzero):]):
        raise ArithmeticError(f"Smith normal form divisibility chain broken: {diag}")
    return u, d, v


def elementary_divisors(m: DomainMatrix) -> list[int]:
    _, d, _ = smith_normal_form(m)
    return [int(x) for x in diagonal(d) if x]


@dataclass(frozen=True)
class Membership:
    member: bool
    coordinates: tuple[Fraction, ...]


@dataclass(frozen=True)
class IntegerLattice:
    """A full-rank-in-its-span lattice ``basis · ZZ^r`` inside QQ^n."""

    ambient_dim: int
    basis: DomainMatrix
    snf_certificate: tuple[int, ...] = field(default=())

    @classmethod
    def from_basis(cls, basis: DomainMatrix) -> "IntegerLattice":
        n, r = basis.shape
        if basis.domain != ZZ:
            basis = basis.convert_to(ZZ)
        divisors = tuple(elementary_divisors(basis)) if r else ()
        if len(divisors) != r:
            raise ArithmeticError(f"lattice basis has rank {len(divisors)} < {r} vectors")
        return cls(n, basis.to_sparse(), divisors)

    @property
    def rank(self) -> int:
        return self.basis.shape[1]

    def dual_basis(self) -> DomainMatrix:
        """Rational basis B (BᵀB)⁻¹ of the dual lattice inside span(B)."""
        b = self.basis.convert_to(QQ)
        if not self.rank:
            return zeros(self.ambient_dim, 0)
        return matmul(b, (b.transpose() * b).inv().to_sparse())


def lattice_membership(lattice: IntegerLattice, v: DomainMatrix) -> Membership:
    """Decide ``v ∈ lattice`` by SNF back-substitution.

    Returns the integer coordinates of a member, or the fractional coordinate
    vector as a refusal witness. NotInSpan if v is outside the rational span.
    """
    v = v.convert_to(QQ)
    if not lattice.rank:
        if not is_zero(v):
            raise NotInSpan("lattice has rank 0 and v is nonzero")
        return Membership(True, ())
    u, d, w = smith_normal_form(lattice.basis)
    uv = matmul(u.convert_to(QQ), v)
    diag = [int(x) for x in diagonal(d)]
    r = len([x for x in diag if x])
    values = column_entries(uv)
    if any(i >= r for i in values):
        raise NotInSpan("vector is outside the rational span of the lattice")
    y = column({i: values.get(i, Fraction(0)) / diag[i] for i in range(r)}, lattice.rank)
    coords = column_entries(matmul(w.convert_to(QQ), y))
    x = tuple(coords.get(i, Fraction(0)) for i in range(lattice.rank))
    return Membership(all(c.denominator == 1 for c in x), x)


def lcm_denominator(values) -> int:
    out = 1
    for value in values:
        q = Fraction(value).denominator
        out = out * q // gcd(out, q)
    return out
