"""Exact polyhedral primitives: rational LP, cone/polytope H- and V-descriptions.

The LP is a dense two-phase simplex over Fractions with Bland's rule. It is
only ever asked small questions (a handful of variables), so it is written
for auditability rather than speed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .lattice import as_fraction, det, dot, nullspace, primitive, rank

F0 = Fraction(0)


@dataclass(frozen=True)
class LPResult:
    status: str  # "optimal", "infeasible", "unbounded"
    x: tuple[Fraction, ...] | None = None
    value: Fraction | None = None


def _pivot(T, r, c):
    piv = T[r][c]
    T[r] = [v / piv for v in T[r]]
    for i, row in enumerate(T):
        if i != r and row[c] != 0:
            f = row[c]
            T[i] = [a - f * b for a, b in zip(row, T[r])]


def _simplex(T, basis, ncols, allowed):
    """Maximise the objective stored in the last row (as reduced costs)."""
    obj = len(T) - 1
    while True:
        enter = next((j for j in range(ncols) if allowed[j] and T[obj][j] < 0), None)
        if enter is None:
            return "optimal"
        best = None
        for i in range(obj):
            if T[i][enter] > 0:
                ratio = T[i][-1] / T[i][enter]
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            return "unbounded"
        r = best[1]
        _pivot(T, r, enter)
        basis[r] = enter


def linprog(c: Sequence, A_ub: Sequence[Sequence] = (), b_ub: Sequence = (),
            A_eq: Sequence[Sequence] = (), b_eq: Sequence = ()) -> LPResult:
    """Maximise ``c . x`` subject to ``A_ub x <= b_ub``, ``A_eq x == b_eq``; x free."""
    n = len(c)
    c = [as_fraction(v) for v in c]
    rows, rhs, slack_of = [], [], []
    for a, b in zip(A_ub, b_ub):
        rows.append([as_fraction(v) for v in a])
        rhs.append(as_fraction(b))
        slack_of.append(True)
    for a, b in zip(A_eq, b_eq):
        rows.append([as_fraction(v) for v in a])
        rhs.append(as_fraction(b))
        slack_of.append(False)
    m = len(rows)
    n_slack = sum(slack_of)
    # columns: x+ (n), x- (n), slacks, artificials (m)
    nvar = 2 * n + n_slack + m
    T = []
    basis = []
    s_idx = 0
    for i in range(m):
        row = rows[i] + [-v for v in rows[i]] + [F0] * n_slack + [F0] * m
        if slack_of[i]:
            row[2 * n + s_idx] = Fraction(1)
            s_idx += 1
        b = rhs[i]
        if b < 0:
            row = [-v for v in row]
            b = -b
        row[2 * n + n_slack + i] = Fraction(1)
        T.append(row + [b])
        basis.append(2 * n + n_slack + i)
    # phase 1: maximise -sum(artificials)
    obj = [F0] * (nvar + 1)
    for i in range(m):
        obj = [o - v for o, v in zip(obj, T[i])]
    for i in range(m):
        obj[2 * n + n_slack + i] = F0
    T.append(obj)
    allowed = [True] * nvar
    _simplex(T, basis, nvar, allowed)
    if T[-1][-1] != 0:
        return LPResult("infeasible")
    art0 = 2 * n + n_slack
    # drive remaining artificials out of the basis
    for i in range(m):
        if basis[i] >= art0:
            j = next((j for j in range(art0) if T[i][j] != 0), None)
            if j is not None:
                _pivot(T, i, j)
                basis[i] = j
    allowed = [j < art0 for j in range(nvar)]
    obj = [F0] * (nvar + 1)
    for j in range(n):
        obj[j] = -c[j]
        obj[n + j] = c[j]
    for i in range(m):
        if obj[basis[i]] != 0:
            f = obj[basis[i]]
            obj = [o - f * v for o, v in zip(obj, T[i])]
    T[-1] = obj
    status = _simplex(T, basis, nvar, allowed)
    if status == "unbounded":
        return LPResult("unbounded")
    vals = [F0] * nvar
    for i in range(m):
        vals[basis[i]] = T[i][-1]
    x = tuple(vals[j] - vals[n + j] for j in range(n))
    return LPResult("optimal", x, dot(c, x))


def feasible_point(A_ub=(), b_ub=(), A_eq=(), b_eq=(), n: int | None = None):
    if n is None:
        n = len((list(A_ub) + list(A_eq))[0])
    res = linprog([0] * n, A_ub, b_ub, A_eq, b_eq)
    return res.x if res.status == "optimal" else None


# --------------------------------------------------------------------------
# Cones


@dataclass(frozen=True)
class ConeHRep:
    """{x : eq . x == 0 for eq in equations, f . x >= 0 for f in facets}.

    ``facet_rays[i]`` is the set of generator indices lying on facet i.
    """

    ambient: int
    equations: tuple[tuple[int, ...], ...]
    facets: tuple[tuple[int, ...], ...]
    facet_rays: tuple[frozenset, ...]

    def contains(self, x: Sequence) -> bool:
        return (all(dot(e, x) == 0 for e in self.equations)
                and all(dot(f, x) >= 0 for f in self.facets))

    def in_relint(self, x: Sequence) -> bool:
        return (all(dot(e, x) == 0 for e in self.equations)
                and all(dot(f, x) > 0 for f in self.facets))


def _int_basis(vectors) -> list[tuple[int, ...]]:
    return [primitive(v) for v in vectors]


def cone_hrep(gens: Sequence[Sequence[int]], ambient: int) -> ConeHRep:
    """H-description of cone(gens); gens may be redundant but not contain a line."""
    gens = [tuple(g) for g in gens]
    d = rank(gens) if gens else 0
    eqs = _int_basis(nullspace(gens, ambient)) if gens else \
        [tuple(int(i == j) for j in range(ambient)) for i in range(ambient)]
    facets: dict[frozenset, tuple[int, ...]] = {}
    if d == 1:
        g = next(v for v in gens if any(v))
        u = primitive(g)
        if all(dot(u, v) >= 0 for v in gens):
            facets[frozenset(i for i, v in enumerate(gens) if dot(u, v) == 0)] = u
    elif d > 1:
        for sub in combinations(range(len(gens)), d - 1):
            vs = [gens[i] for i in sub]
            if rank(vs) != d - 1:
                continue
            cand = next((u for u in nullspace(vs, ambient)
                         if any(dot(u, g) != 0 for g in gens)), None)
            if cand is None:
                continue
            vals = [dot(cand, g) for g in gens]
            if all(v >= 0 for v in vals):
                u = cand
            elif all(v <= 0 for v in vals):
                u = tuple(-a for a in cand)
            else:
                continue
            zero = frozenset(i for i, g in enumerate(gens) if dot(u, g) == 0)
            if zero not in facets:
                facets[zero] = primitive(u)
    keys = sorted(facets, key=lambda s: sorted(s))
    return ConeHRep(ambient, tuple(eqs), tuple(facets[k] for k in keys), tuple(keys))


def cone_faces(gens: Sequence[Sequence[int]], ambient: int) -> list[frozenset]:
    """All faces of cone(gens) as sets of generator indices (incl. the apex face)."""
    h = cone_hrep(gens, ambient)
    full = frozenset(range(len(gens)))
    faces = {full}
    frontier = [full]
    while frontier:
        nxt = []
        for f in frontier:
            for z in h.facet_rays:
                g = f & z
                if g not in faces:
                    faces.add(g)
                    nxt.append(g)
        frontier = nxt
    return sorted(faces, key=lambda s: (len(s), sorted(s)))


def is_pointed(gens: Sequence[Sequence[int]], ambient: int) -> bool:
    """True iff cone(gens) contains no line."""
    gens = [tuple(g) for g in gens if any(g)]
    if not gens:
        return True
    k = len(gens)
    # sum lambda_i g_i == 0, sum lambda == 1, lambda >= 0 feasible  <=> not pointed
    A_eq = [[g[j] for g in gens] for j in range(ambient)] + [[1] * k]
    b_eq = [0] * ambient + [1]
    A_ub = [[-int(i == j) for j in range(k)] for i in range(k)]
    return feasible_point(A_ub, [0] * k, A_eq, b_eq, k) is None


def in_cone(x: Sequence, gens: Sequence[Sequence[int]]) -> bool:
    """LP membership test x in cone(gens) (independent of cone_hrep)."""
    gens = [tuple(g) for g in gens]
    n = len(x)
    if not gens:
        return all(as_fraction(a) == 0 for a in x)
    k = len(gens)
    A_eq = [[g[j] for g in gens] for j in range(n)]
    A_ub = [[-int(i == j) for j in range(k)] for i in range(k)]
    return feasible_point(A_ub, [0] * k, A_eq, list(x), k) is not None


def hcone_extreme_rays(equations, inequalities, ambient: int) -> list[tuple[int, ...]]:
    """Extreme rays of the pointed cone {E x == 0, B x <= 0}."""
    E = [tuple(e) for e in equations]
    B = [tuple(b) for b in inequalities]
    base = rank(E) if E else 0
    k = ambient - base
    if k <= 0:
        return []
    out: set[tuple[int, ...]] = set()
    for sub in combinations(range(len(B)), k - 1):
        rows = E + [B[i] for i in sub]
        if (rank(rows) if rows else 0) != ambient - 1:
            continue
        ker = nullspace(rows, ambient)
        if len(ker) != 1:
            continue
        r = primitive(ker[0])
        for s in (r, tuple(-a for a in r)):
            if all(dot(b, s) <= 0 for b in B):
                out.add(s)
    return sorted(out)


# --------------------------------------------------------------------------
# Polytopes


@dataclass(frozen=True)
class PolytopeHRep:
    """{x : a + u . x >= 0} per facet; ``facet_points`` as indices into points."""

    dim: int
    normals: tuple[tuple[int, ...], ...]
    offsets: tuple[Fraction, ...]
    facet_points: tuple[frozenset, ...]

    def contains(self, x) -> bool:
        return all(a + dot(u, x) >= 0 for u, a in zip(self.normals, self.offsets))


def _homogenize(points):
    out = []
    for p in points:
        q = [as_fraction(a) for a in p]
        den = 1
        for a in q:
            den = den * a.denominator // math.gcd(den, a.denominator)
        out.append(tuple([den] + [int(a * den) for a in q]))
    return out


def polytope_hrep(points: Sequence[Sequence], dim: int) -> PolytopeHRep:
    """Facets of a full-dimensional polytope conv(points) with inner normals."""
    hom = _homogenize(points)
    h = cone_hrep(hom, dim + 1)
    if h.equations:
        raise ValueError("polytope is not full-dimensional")
    normals, offsets = [], []
    for f in h.facets:
        u = f[1:]
        a = Fraction(f[0])
        g = primitive(u)
        scale = next(Fraction(x) / Fraction(y) for x, y in zip(u, g) if y != 0)
        normals.append(g)
        offsets.append(a / scale)
    return PolytopeHRep(dim, tuple(normals), tuple(offsets), h.facet_rays)


def polytope_faces(points: Sequence[Sequence], dim: int) -> list[frozenset]:
    """Nonempty faces of conv(points) as index sets into ``points``."""
    hom = _homogenize(points)
    return [f for f in cone_faces(hom, dim + 1) if f]


def polytope_vertices(points: Sequence[Sequence], dim: int) -> list[int]:
    """Indices of the extreme points among ``points``."""
    hom = _homogenize(points)
    faces = cone_faces(hom, dim + 1)
    return sorted(min(f) for f in faces if f and len({hom[i] for i in f}) == 1)


def simplex_volume(points: Sequence[Sequence]) -> Fraction:
    """Unnormalised |det| of the edge vectors of a simplex (d+1 points in R^d)."""
    p0 = [as_fraction(a) for a in points[0]]
    rows = [[as_fraction(a) - b for a, b in zip(p, p0)] for p in points[1:]]
    return abs(det(rows))
