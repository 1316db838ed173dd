"""Tropical polynomials, their corner loci as exact cell complexes, and the
comparison of the boundary of the origin's region with a sphere fanifold."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Sequence

from .fan import Fan, is_complete
from .fanifold import sphere_fanifold
from .lattice import as_fraction, dot, rank, solve
from .polyhedra import hcone_extreme_rays, linprog, polytope_hrep, simplex_volume


class TropicalError(ValueError):
    pass


@dataclass(frozen=True)
class Triangulation:
    vertices: tuple[tuple[int, ...], ...]
    simplices: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(tuple(int(a) for a in v) for v in self.vertices))
        object.__setattr__(self, "simplices", tuple(tuple(sorted(int(i) for i in s)) for s in self.simplices))

    @property
    def dim(self) -> int:
        return len(self.vertices[0]) if self.vertices else 0

    @cached_property
    def origin(self) -> int | None:
        z = tuple([0] * self.dim)
        return self.vertices.index(z) if z in self.vertices else None

    def faces(self) -> list[frozenset]:
        out = set()
        for s in self.simplices:
            for k in range(1, len(s) + 1):
                out.update(frozenset(c) for c in combinations(s, k))
        return sorted(out, key=lambda f: (len(f), sorted(f)))

    def walls(self) -> list[tuple[int, int, frozenset]]:
        """Pairs of maximal simplices sharing a facet."""
        out = []
        for i, j in combinations(range(len(self.simplices)), 2):
            common = frozenset(self.simplices[i]) & frozenset(self.simplices[j])
            if len(common) == self.dim:
                out.append((i, j, common))
        return out


@dataclass
class Verdict:
    ok: bool
    failures: list[str] = field(default_factory=list)

    def __bool__(self):
        return self.ok


def validate_triangulation(T: Triangulation) -> Verdict:
    """Nondegenerate simplices with disjoint interiors whose facets are either
    shared by two simplices or lie on the boundary of the hull."""
    v = Verdict(True)
    d = T.dim
    for s in T.simplices:
        if len(s) != d + 1 or simplex_volume([T.vertices[i] for i in s]) == 0:
            v.failures.append(f"simplex {list(s)} is degenerate")
    if v.failures:
        v.ok = False
        return v
    for i, j in combinations(range(len(T.simplices)), 2):
        if _interiors_meet(T, T.simplices[i], T.simplices[j]):
            v.failures.append(f"simplices {list(T.simplices[i])} and {list(T.simplices[j])} overlap")
    if d > 0:
        h = polytope_hrep(T.vertices, d)
        count: dict[frozenset, int] = {}
        for s in T.simplices:
            for f in combinations(s, d):
                count[frozenset(f)] = count.get(frozenset(f), 0) + 1
        for f, c in count.items():
            on_boundary = any(all(a + dot(u, T.vertices[k]) == 0 for k in f)
                              for u, a in zip(h.normals, h.offsets))
            if (on_boundary and c != 1) or (not on_boundary and c != 2):
                v.failures.append(f"facet {sorted(f)} is not properly covered")
    v.ok = not v.failures
    return v


def _interiors_meet(T: Triangulation, a, b) -> bool:
    ka, kb, d = len(a), len(b), T.dim
    # variables: lambda (ka), nu (kb), s; maximise s with lambda, nu >= s
    n = ka + kb + 1
    A_eq = [[T.vertices[i][j] for i in a] + [-T.vertices[i][j] for i in b] + [0] for j in range(d)]
    A_eq.append([1] * ka + [0] * kb + [0])
    A_eq.append([0] * ka + [1] * kb + [0])
    A_ub = [[-int(i == k) for k in range(n - 1)] + [1] for i in range(n - 1)] + [[0] * (n - 1) + [1]]
    res = linprog([0] * (n - 1) + [1], A_ub, [0] * (n - 1) + [1], A_eq, [0] * d + [1, 1])
    return res.status == "optimal" and res.value > 0


def star_shaped_check(T: Triangulation) -> bool:
    o = T.origin
    if o is None:
        raise TropicalError("the origin is not a vertex of the triangulation")
    return all(o in s for s in T.simplices)


# --------------------------------------------------------------------------
# PL functions and tropical polynomials


def _affine_extension(T: Triangulation, s, mu) -> tuple[tuple[Fraction, ...], Fraction]:
    """(a, b) with a . v + b = mu(v) on the vertices of simplex s."""
    rows = [list(T.vertices[i]) + [1] for i in s]
    sol = solve(rows, [mu[i] for i in s])
    if sol is None or len(s) != T.dim + 1:
        raise TropicalError(f"simplex {list(s)} is degenerate")
    return tuple(sol[:-1]), sol[-1]


def adapted_check(T: Triangulation, mu: Sequence) -> Verdict:
    """Strict convexity of mu across every interior wall."""
    mu = [as_fraction(m) for m in mu]
    for s in T.simplices:
        if simplex_volume([T.vertices[i] for i in s]) == 0:
            raise TropicalError(f"simplex {list(s)} has zero volume")
    v = Verdict(True)
    for i, j, common in T.walls():
        si, sj = T.simplices[i], T.simplices[j]
        a, b = _affine_extension(T, si, mu)
        (w,) = set(sj) - common
        ext = dot(a, T.vertices[w]) + b
        if ext == mu[w]:
            v.failures.append(f"wall {sorted(common)}: mu is affine across it")
        elif ext > mu[w]:
            v.failures.append(f"wall {sorted(common)}: mu is concave across it")
    v.ok = not v.failures
    return v


@dataclass(frozen=True)
class TropicalPolynomial:
    """phi(m) = max over terms of <m, alpha> + weight."""

    terms: tuple[tuple[tuple[int, ...], Fraction], ...]

    def __post_init__(self):
        if not self.terms:
            raise TropicalError("a tropical polynomial needs at least one term")

    @classmethod
    def from_pl(cls, T: Triangulation, mu: Sequence) -> "TropicalPolynomial":
        return cls(tuple((v, -as_fraction(m)) for v, m in zip(T.vertices, mu)))

    @property
    def dim(self) -> int:
        return len(self.terms[0][0])


def trop_eval(phi: TropicalPolynomial, m: Sequence) -> tuple[Fraction, frozenset]:
    """Value and set of maximising exponents."""
    m = [as_fraction(a) for a in m]
    if len(m) != phi.dim:
        raise ValueError("dimension mismatch")
    vals = [(dot(alpha, m) + w, alpha) for alpha, w in phi.terms]
    best = max(v for v, _ in vals)
    return best, frozenset(a for v, a in vals if v == best)


def argmax_indices(T: Triangulation, mu: Sequence, m: Sequence) -> frozenset:
    mu = [as_fraction(a) for a in mu]
    m = [as_fraction(a) for a in m]
    vals = [dot(v, m) - u for v, u in zip(T.vertices, mu)]
    best = max(vals)
    return frozenset(i for i, a in enumerate(vals) if a == best)


# --------------------------------------------------------------------------
# the corner locus


@dataclass(frozen=True)
class TropicalCell:
    """{m : argmax contains ``label``}; equations/inequalities as (u, c)
    meaning u . m == c and u . m <= c."""

    label: frozenset
    dim: int
    equations: tuple[tuple[tuple[int, ...], Fraction], ...]
    inequalities: tuple[tuple[tuple[int, ...], Fraction], ...]
    vertices: tuple[tuple[Fraction, ...], ...]
    rays: tuple[tuple[int, ...], ...]

    def contains(self, m) -> bool:
        return (all(dot(u, m) == c for u, c in self.equations)
                and all(dot(u, m) <= c for u, c in self.inequalities))

    def in_relint(self, m) -> bool:
        return (all(dot(u, m) == c for u, c in self.equations)
                and all(dot(u, m) < c for u, c in self.inequalities))

    @property
    def bounded(self) -> bool:
        return not self.rays


@dataclass
class TropicalComplex:
    dim: int  # ambient rank
    cells: list[TropicalCell]
    incidence: set  # (A, B): cell A lies in the closure of cell B

    def cell(self, label) -> TropicalCell:
        label = frozenset(label)
        for c in self.cells:
            if c.label == label:
                return c
        raise KeyError(sorted(label))

    def of_dim(self, k: int) -> list[TropicalCell]:
        return [c for c in self.cells if c.dim == k]

    def locate(self, m) -> list[TropicalCell]:
        return [c for c in self.cells if c.in_relint(m)]


def _system(T: Triangulation, mu, A):
    A = sorted(A)
    a0 = A[0]
    v0 = T.vertices[a0]
    eqs = tuple((tuple(x - y for x, y in zip(T.vertices[a], v0)), mu[a] - mu[a0]) for a in A[1:])
    ineqs = tuple((tuple(x - y for x, y in zip(T.vertices[b], v0)), mu[b] - mu[a0])
                  for b in range(len(T.vertices)) if b not in A)
    return eqs, ineqs


def _relint_point(eqs, ineqs, d):
    """A point satisfying eqs with all inequalities strict, or None."""
    n = d + 1
    A_ub = [list(u) + [1] for u, _ in ineqs] + [[0] * d + [1]]
    b_ub = [c for _, c in ineqs] + [1]
    res = linprog([0] * d + [1], A_ub, b_ub, [list(u) + [0] for u, _ in eqs], [c for _, c in eqs])
    if res.status != "optimal" or res.value <= 0:
        return None
    return res.x[:d]


def dual_complex(T: Triangulation, mu: Sequence, check: bool = True) -> TropicalComplex:
    """Cells C_A of the corner locus, one per face A of T with |A| >= 2."""
    mu = [as_fraction(m) for m in mu]
    if check:
        v = adapted_check(T, mu)
        if not v.ok:
            raise TropicalError("; ".join(v.failures))
    d = T.dim
    cells = []
    for A in T.faces():
        if len(A) < 2:
            continue
        eqs, ineqs = _system(T, mu, A)
        if _relint_point(eqs, ineqs, d) is None:
            continue
        dim = d - rank([u for u, _ in eqs])
        rays = hcone_extreme_rays([u for u, _ in eqs], [u for u, _ in ineqs], d) if dim > 0 else []
        cells.append(TropicalCell(A, dim, eqs, ineqs, (), tuple(rays)))
    # vertices of each cell are the 0-cells in its closure
    zero = {c.label: solve([list(u) for u, _ in c.equations], [k for _, k in c.equations])
            for c in cells if c.dim == 0}
    out = []
    for c in cells:
        verts = tuple(sorted(tuple(p) for lab, p in zero.items() if c.label <= lab))
        out.append(TropicalCell(c.label, c.dim, c.equations, c.inequalities, verts, c.rays))
    incidence = {(a.label, b.label) for a in out for b in out if b.label < a.label}
    return TropicalComplex(d, out, incidence)


@dataclass(frozen=True)
class Region:
    vertex: int
    exponent: tuple[int, ...]
    witness: tuple[Fraction, ...]


def complement_components(T: Triangulation, mu: Sequence) -> list[Region]:
    """One open region per vertex of T where that term alone is maximal."""
    mu = [as_fraction(m) for m in mu]
    out = []
    for i, v in enumerate(T.vertices):
        eqs, ineqs = _system(T, mu, [i])
        w = _relint_point(eqs, ineqs, T.dim)
        if w is not None:
            out.append(Region(i, v, tuple(w)))
    return out


def grid_oracle(T: Triangulation, mu: Sequence, PC: TropicalComplex, lo=-4, hi=4,
                pitch=Fraction(1, 8)) -> Verdict:
    """Pointwise argmax labels versus cell membership on a rational grid."""
    from itertools import product

    pitch = as_fraction(pitch)
    steps = int((as_fraction(hi) - as_fraction(lo)) / pitch)
    axis = [as_fraction(lo) + k * pitch for k in range(steps + 1)]
    v = Verdict(True)
    by_label = {c.label: c for c in PC.cells}
    for m in product(*([axis] * T.dim)):
        lab = argmax_indices(T, mu, m)
        hits = [c.label for c in PC.cells if c.in_relint(m)]
        want = [lab] if len(lab) >= 2 else []
        if hits != want or (want and lab not in by_label):
            v.failures.append(f"at {[str(a) for a in m]}: argmax {sorted(lab)}, cells {[sorted(h) for h in hits]}")
    v.ok = not v.failures
    return v


# --------------------------------------------------------------------------
# the boundary of the origin's region versus the sphere fanifold


@dataclass
class EmbeddingReport:
    ok: bool
    mapping: dict  # stratum id -> cell label
    failures: list[str] = field(default_factory=list)


def psi_embedding_check(F: Fan, T: Triangulation, mu: Sequence,
                        labeling: dict | None = None) -> EmbeddingReport:
    """Match strata of the sphere fanifold of F with the cells of the
    boundary of the origin's complement component, reversing inclusions."""
    fails = []
    o = T.origin
    if o is None or not star_shaped_check(T):
        raise TropicalError("triangulation must be star-shaped at the origin")
    if not is_complete(F):
        fails.append("fan is not complete")
    nonzero = {v: i for i, v in enumerate(T.vertices) if i != o}
    if set(F.rays) != set(nonzero):
        fails.append("rays of the fan are not the nonzero vertices of T")
    if any(len(c) != F.dims[k] for k, c in enumerate(F.cones)):
        fails.append("fan is not simplicial")
    if fails:
        return EmbeddingReport(False, {}, fails)
    PC = dual_complex(T, mu)
    boundary = {c.label: c for c in PC.cells if o in c.label}
    phi = sphere_fanifold(F)
    vid = {k: nonzero[F.rays[k]] for k in range(len(F.rays))}
    cone_of = {}
    for i, c in enumerate(F.cones):
        if c:
            cone_of["s" + "_".join(str(k) for k in sorted(c))] = i
    default = {sid: frozenset({o} | {vid[k] for k in F.cones[i]}) for sid, i in cone_of.items()}
    mapping = dict(labeling) if labeling is not None else default
    mapping = {k: frozenset(v) for k, v in mapping.items()}
    n = T.dim - 1
    ids = [s.id for s in phi.strata]
    if sorted(mapping) != sorted(ids):
        fails.append("labeling does not cover the strata")
    if sorted(map(sorted, mapping.values())) != sorted(map(sorted, boundary)):
        fails.append("labeling is not a bijection onto the boundary cells")
    for s in phi.strata:
        lab = mapping.get(s.id)
        if lab is None or lab not in boundary:
            continue
        if lab != default[s.id]:
            fails.append(f"stratum {s.id} is labeled {sorted(lab)}, its cone gives {sorted(default[s.id])}")
        if boundary[lab].dim != n - s.dim:
            fails.append(f"stratum {s.id} of dim {s.dim} matched with a cell of dim {boundary[lab].dim}, expected {n - s.dim}")
    for a in phi.arrows:
        la, lb = mapping.get(a.src), mapping.get(a.dst)
        if la in boundary and lb in boundary and (lb, la) not in PC.incidence:
            fails.append(f"{a.src} < {a.dst} is not reversed by the cells")
    return EmbeddingReport(not fails, mapping, fails)
