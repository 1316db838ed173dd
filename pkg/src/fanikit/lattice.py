"""Exact integer and rational linear algebra.

Everything here works on Python ints and :class:`fractions.Fraction`; no
floating point is ever involved. Matrices are small (rank <= 5 or so in
practice), so clarity wins over asymptotics.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd
from typing import Iterable, Sequence

Vector = tuple[int, ...]
QVector = tuple[Fraction, ...]


def as_fraction(x) -> Fraction:
    """Parse ints, Fractions and ``"p/q"`` strings into a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a scalar")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot read {x!r} as an exact rational")


def fraction_str(x: Fraction) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def vector_gcd(v: Iterable[int]) -> int:
    return reduce(gcd, (abs(int(a)) for a in v), 0)


def primitive(v: Sequence) -> Vector:
    """Primitive integer vector on the ray through ``v`` (rational input ok)."""
    q = [as_fraction(a) for a in v]
    den = reduce(lambda a, b: a * b // gcd(a, b), (a.denominator for a in q), 1)
    ints = [int(a * den) for a in q]
    g = vector_gcd(ints)
    if g == 0:
        raise ValueError("zero vector has no primitive generator")
    return tuple(a // g for a in ints)


def dot(u: Sequence, v: Sequence):
    return sum(a * b for a, b in zip(u, v))


@dataclass(frozen=True)
class IntMatrix:
    """Immutable integer matrix. ``rows`` holds the entries row by row."""

    nrows: int
    ncols: int
    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.rows) != self.nrows or any(len(r) != self.ncols for r in self.rows):
            raise ValueError("inconsistent matrix dimensions")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], ncols: int | None = None) -> "IntMatrix":
        rows = tuple(tuple(int(a) for a in r) for r in rows)
        if ncols is None:
            if not rows:
                raise ValueError("ncols required for a matrix with no rows")
            ncols = len(rows[0])
        return cls(len(rows), ncols, rows)

    @classmethod
    def from_columns(cls, cols: Sequence[Sequence[int]], nrows: int) -> "IntMatrix":
        cols = [tuple(int(a) for a in c) for c in cols]
        return cls(nrows, len(cols), tuple(tuple(c[i] for c in cols) for i in range(nrows)))

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @classmethod
    def zeros(cls, m: int, n: int) -> "IntMatrix":
        return cls(m, n, tuple((0,) * n for _ in range(m)))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    @property
    def T(self) -> "IntMatrix":
        return IntMatrix(self.ncols, self.nrows,
                         tuple(tuple(self.rows[i][j] for i in range(self.nrows))
                               for j in range(self.ncols)))

    def column(self, j: int) -> Vector:
        return tuple(r[j] for r in self.rows)

    def columns(self) -> list[Vector]:
        return [self.column(j) for j in range(self.ncols)]

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __matmul__(self, other):
        if isinstance(other, IntMatrix):
            if self.ncols != other.nrows:
                raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
            cols = other.columns()
            return IntMatrix(self.nrows, other.ncols,
                             tuple(tuple(dot(r, c) for c in cols) for r in self.rows))
        v = tuple(other)
        if len(v) != self.ncols:
            raise ValueError("vector length mismatch")
        return tuple(dot(r, v) for r in self.rows)

    def __neg__(self) -> "IntMatrix":
        return IntMatrix(self.nrows, self.ncols, tuple(tuple(-a for a in r) for r in self.rows))

    def det(self) -> int:
        if self.nrows != self.ncols:
            raise ValueError("determinant of a non-square matrix")
        return int(det([list(r) for r in self.rows]))

    def is_unimodular(self) -> bool:
        return self.nrows == self.ncols and abs(self.det()) == 1

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.rows]

    def __repr__(self):
        return f"IntMatrix({self.tolist()}, shape={self.shape})"


def det(rows: Sequence[Sequence]) -> Fraction:
    """Exact determinant by fraction-free-ish Gaussian elimination."""
    n = len(rows)
    a = [[as_fraction(x) for x in r] for r in rows]
    sign, result = 1, Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if a[r][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            a[c], a[p] = a[p], a[c]
            sign = -sign
        result *= a[c][c]
        for r in range(c + 1, n):
            f = a[r][c] / a[c][c]
            if f:
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return sign * result


def rref(rows: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form over Q and the pivot columns."""
    a = [[as_fraction(x) for x in r] for r in rows]
    if not a:
        return [], []
    m, n = len(a), len(a[0])
    pivots: list[int] = []
    r = 0
    for c in range(n):
        p = next((i for i in range(r, m) if a[i][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        piv = a[r][c]
        a[r] = [x / piv for x in a[r]]
        for i in range(m):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    return a, pivots


def rank(vectors: Sequence[Sequence]) -> int:
    vectors = list(vectors)
    if not vectors:
        return 0
    return len(rref(vectors)[1])


def nullspace(rows: Sequence[Sequence], ncols: int) -> list[QVector]:
    """Basis of {x in Q^ncols : rows . x = 0}."""
    if not rows:
        return [tuple(Fraction(int(i == j)) for j in range(ncols)) for i in range(ncols)]
    red, pivots = rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for i, p in enumerate(pivots):
            x[p] = -red[i][f]
        basis.append(tuple(x))
    return basis


def solve(rows: Sequence[Sequence], rhs: Sequence) -> QVector | None:
    """One rational solution of ``rows . x = rhs``, or None if inconsistent."""
    m = len(rows)
    if m == 0:
        return ()
    n = len(rows[0])
    aug = [list(r) + [rhs[i]] for i, r in enumerate(rows)]
    red, pivots = rref(aug)
    if n in pivots:
        return None
    x = [Fraction(0)] * n
    for i, p in enumerate(pivots):
        x[p] = red[i][n]
    return tuple(x)


def inverse(rows: Sequence[Sequence]) -> list[list[Fraction]]:
    n = len(rows)
    aug = [list(r) + [int(i == j) for j in range(n)] for i, r in enumerate(rows)]
    red, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise ValueError("singular matrix")
    return [r[n:] for r in red]


# --------------------------------------------------------------------------
# Smith normal form


@dataclass(frozen=True)
class SnfDecomposition:
    """``U @ A @ V == S`` with U, V unimodular and S diagonal, d1 | d2 | ..."""

    U: IntMatrix
    S: IntMatrix
    V: IntMatrix

    @property
    def diagonal(self) -> tuple[int, ...]:
        return tuple(self.S[i, i] for i in range(min(self.S.shape)))

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diagonal if d != 0)


def snf(A: IntMatrix) -> SnfDecomposition:
    m, n = A.shape
    D = [list(r) for r in A.rows]
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in D:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, k):  # row dst += k * row src
        D[dst] = [a + k * b for a, b in zip(D[dst], D[src])]
        U[dst] = [a + k * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, k):  # col dst += k * col src
        for row in D:
            row[dst] += k * row[src]
        for row in V:
            row[dst] += k * row[src]

    for t in range(min(m, n)):
        while True:
            nz = [(abs(D[i][j]), i, j) for i in range(t, m) for j in range(t, n) if D[i][j]]
            if not nz:
                break
            _, pi, pj = min(nz)
            swap_rows(t, pi)
            swap_cols(t, pj)
            dirty = False
            for i in range(t + 1, m):
                if D[i][t]:
                    add_row(i, t, -(D[i][t] // D[t][t]))
                    dirty |= D[i][t] != 0
            for j in range(t + 1, n):
                if D[t][j]:
                    add_col(j, t, -(D[t][j] // D[t][t]))
                    dirty |= D[t][j] != 0
            if dirty:
                continue
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if D[i][j] % D[t][t]), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if t < m and t < n and D[t][t] < 0:
            D[t] = [-a for a in D[t]]
            U[t] = [-a for a in U[t]]

    return SnfDecomposition(IntMatrix.from_rows(U, m), IntMatrix.from_rows(D, n),
                            IntMatrix.from_rows(V, n))


def unimodular_inverse(M: IntMatrix) -> IntMatrix:
    inv = inverse(M.rows)
    out = []
    for r in inv:
        if any(x.denominator != 1 for x in r):
            raise ValueError("matrix is not unimodular")
        out.append([int(x) for x in r])
    return IntMatrix.from_rows(out, M.ncols)


# --------------------------------------------------------------------------
# Sublattices, quotients, cokernels


@dataclass(frozen=True)
class Sublattice:
    """Sublattice of Z^ambient_rank with independent basis columns."""

    ambient_rank: int
    basis: IntMatrix
    saturated: bool = False

    def __post_init__(self):
        if self.basis.nrows != self.ambient_rank:
            raise ValueError("basis rows must equal the ambient rank")
        if rank(self.basis.columns()) != self.basis.ncols:
            raise ValueError("basis columns are not linearly independent")

    @classmethod
    def span(cls, ambient_rank: int, vectors: Iterable[Sequence[int]]) -> "Sublattice":
        """Integer span of ``vectors``, reduced to a basis."""
        vecs = [tuple(int(a) for a in v) for v in vectors]
        if not vecs:
            return cls(ambient_rank, IntMatrix.zeros(ambient_rank, 0), True)
        A = IntMatrix.from_columns(vecs, ambient_rank)
        dec = snf(A)
        r = dec.rank
        Uinv = unimodular_inverse(dec.U)
        cols = [tuple(c * dec.diagonal[j] for c in Uinv.column(j)) for j in range(r)]
        return cls(ambient_rank, IntMatrix.from_columns(cols, ambient_rank),
                   all(d == 1 for d in dec.diagonal[:r]))

    @property
    def rank(self) -> int:
        return self.basis.ncols

    def generators(self) -> list[Vector]:
        return self.basis.columns()

    def contains(self, v: Sequence[int]) -> bool:
        """Exact integer membership test."""
        if self.rank == 0:
            return all(a == 0 for a in v)
        dec = snf(self.basis)
        y = dec.U @ tuple(int(a) for a in v)
        for i, yi in enumerate(y):
            d = dec.diagonal[i] if i < len(dec.diagonal) else 0
            if d == 0:
                if yi != 0:
                    return False
            elif yi % d:
                return False
        return True

    def contains_lattice(self, other: "Sublattice") -> bool:
        return all(self.contains(g) for g in other.generators())

    def __eq__(self, other):
        if not isinstance(other, Sublattice):
            return NotImplemented
        return (self.ambient_rank == other.ambient_rank and self.rank == other.rank
                and self.contains_lattice(other) and other.contains_lattice(self))

    def __hash__(self):
        return hash((self.ambient_rank, self.rank))


def saturate(L: Sublattice) -> Sublattice:
    """(L tensor Q) intersected with Z^n."""
    if L.rank == 0:
        return Sublattice(L.ambient_rank, L.basis, True)
    dec = snf(L.basis)
    Uinv = unimodular_inverse(dec.U)
    cols = [Uinv.column(j) for j in range(dec.rank)]
    return Sublattice(L.ambient_rank, IntMatrix.from_columns(cols, L.ambient_rank), True)


def is_saturated(L: Sublattice) -> bool:
    return saturate(L) == L


def quotient_lattice(ambient_rank: int, L: Sublattice, strict: bool = False) -> tuple[int, IntMatrix]:
    """Rank of Z^n / L and a surjection Z^n -> Z^(n - rank L) with kernel L.

    ``L`` must be saturated for the kernel to be exactly L. With
    ``strict=True`` an unsaturated input raises; otherwise it is saturated
    first (so the kernel is the saturation).
    """
    if L.ambient_rank != ambient_rank:
        raise ValueError("ambient rank mismatch")
    if not L.saturated or not is_saturated(L):
        if strict:
            raise ValueError("sublattice is not saturated")
        L = saturate(L)
    r = L.rank
    if r == 0:
        return ambient_rank, IntMatrix.identity(ambient_rank)
    dec = snf(L.basis)
    proj = IntMatrix.from_rows(dec.U.rows[r:], ambient_rank)
    return ambient_rank - r, proj


@dataclass(frozen=True)
class Cokernel:
    """Z^m / image(A) as Z^free_rank + sum of Z/d for d in ``torsion``."""

    invariant_factors: tuple[int, ...]
    free_rank: int

    @property
    def torsion(self) -> tuple[int, ...]:
        return tuple(d for d in self.invariant_factors if d > 1)

    @property
    def finite(self) -> bool:
        return self.free_rank == 0

    @property
    def order(self) -> int | None:
        if not self.finite:
            return None
        out = 1
        for d in self.torsion:
            out *= d
        return out

    @property
    def torsion_order(self) -> int:
        out = 1
        for d in self.torsion:
            out *= d
        return out


def cokernel(A: IntMatrix) -> Cokernel:
    """Invariant factors of coker(A: Z^ncols -> Z^nrows)."""
    dec = snf(A)
    diag = [d for d in dec.diagonal if d != 0]
    return Cokernel(tuple(diag), A.nrows - len(diag))


def integer_kernel(A: IntMatrix) -> Sublattice:
    """Saturated lattice {x in Z^ncols : A x = 0}."""
    n = A.ncols
    if A.nrows == 0:
        return Sublattice(n, IntMatrix.identity(n), True)
    dec = snf(A)
    r = dec.rank
    cols = [dec.V.column(j) for j in range(r, n)]
    return Sublattice(n, IntMatrix.from_columns(cols, n) if cols else IntMatrix.zeros(n, 0), True)


def section(P: IntMatrix) -> IntMatrix:
    """Integer right inverse S of a surjection P (P @ S == identity)."""
    dec = snf(P)
    k = P.nrows
    if dec.rank != k or any(d != 1 for d in dec.diagonal[:k]):
        raise ValueError("matrix is not a surjection onto Z^k")
    Vk = IntMatrix.from_rows([r[:k] for r in dec.V.rows], k)
    return Vk @ dec.U


def factor_through(P: IntMatrix, Q: IntMatrix) -> IntMatrix | None:
    """The integer matrix G with G @ P == Q, when ker P <= ker Q; else None."""
    if P.nrows == 0:
        return IntMatrix.zeros(Q.nrows, 0) if all(a == 0 for r in Q.rows for a in r) else None
    G = Q @ section(P)
    return G if G @ P == Q else None
