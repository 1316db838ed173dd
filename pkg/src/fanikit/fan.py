"""Cones, fans, face posets, quotient fans, normal fans and stacky fans."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Iterable, Sequence

from .lattice import (
    IntMatrix,
    Sublattice,
    Vector,
    as_fraction,
    cokernel,
    dot,
    primitive,
    quotient_lattice,
    rank,
    saturate,
    vector_gcd,
)
from .polyhedra import (
    cone_faces,
    cone_hrep,
    feasible_point,
    is_pointed,
    polytope_faces,
    polytope_hrep,
    polytope_vertices,
)
from .poset import Poset


class FanError(ValueError):
    pass


@dataclass(frozen=True)
class Cone:
    """Rational polyhedral cone given by primitive ray generators."""

    ambient: int
    rays: tuple[Vector, ...]

    def __post_init__(self):
        rays = tuple(sorted({tuple(int(a) for a in r) for r in self.rays}))
        for r in rays:
            if len(r) != self.ambient:
                raise FanError(f"ray {r} does not live in rank {self.ambient}")
        object.__setattr__(self, "rays", rays)

    @classmethod
    def of(cls, ambient: int, gens: Iterable[Sequence[int]]) -> "Cone":
        return cls(ambient, tuple(primitive(g) for g in gens))

    @classmethod
    def zero(cls, ambient: int) -> "Cone":
        return cls(ambient, ())

    @cached_property
    def dim(self) -> int:
        return rank(self.rays) if self.rays else 0

    @cached_property
    def hrep(self):
        return cone_hrep(self.rays, self.ambient)

    def contains(self, x) -> bool:
        return self.hrep.contains(x)

    def in_relint(self, x) -> bool:
        return self.hrep.in_relint(x)

    def is_face_of(self, other: "Cone") -> bool:
        if not set(self.rays) <= set(other.rays):
            return False
        idx = {r: i for i, r in enumerate(other.rays)}
        want = frozenset(idx[r] for r in self.rays)
        return want in cone_faces(other.rays, other.ambient)

    def span(self) -> Sublattice:
        """Saturated lattice <sigma> spanned by the cone."""
        return saturate(Sublattice.span(self.ambient, self.rays))

    def __repr__(self):
        return f"Cone({list(map(list, self.rays))})"


@dataclass(frozen=True)
class Fan:
    """A fan: primitive rays plus cones as sets of ray indices.

    The cone list is taken literally (so a missing face is representable and
    reported by :func:`validate_fan`); use :meth:`from_maximal` to build a
    face-closed fan from its maximal cones.
    """

    rank: int
    rays: tuple[Vector, ...]
    cones: tuple[frozenset, ...]

    def __post_init__(self):
        object.__setattr__(self, "rays", tuple(tuple(int(a) for a in r) for r in self.rays))
        cones = tuple(frozenset(int(i) for i in c) for c in self.cones)
        for c in cones:
            if any(i < 0 or i >= len(self.rays) for i in c):
                raise FanError(f"cone {sorted(c)} references a missing ray")
        object.__setattr__(self, "cones", cones)

    @classmethod
    def from_maximal(cls, rank: int, rays: Sequence[Sequence[int]],
                     maximal: Iterable[Iterable[int]]) -> "Fan":
        rays = tuple(tuple(int(a) for a in r) for r in rays)
        seen: set[frozenset] = set()
        for m in maximal:
            m = sorted(set(m))
            gens = [rays[i] for i in m]
            for face in cone_faces(gens, rank):
                seen.add(frozenset(m[i] for i in face))
        seen.add(frozenset())
        cones = sorted(seen, key=lambda s: (len(s), sorted(s)))
        return cls(rank, rays, tuple(cones))

    @cached_property
    def index(self) -> dict[frozenset, int]:
        return {c: i for i, c in enumerate(self.cones)}

    def cone(self, i: int) -> Cone:
        return Cone(self.rank, tuple(self.rays[j] for j in self.cones[i]))

    def find(self, cone: Cone | Iterable[int]) -> int:
        """Index of a cone given as a Cone or as a ray-index set."""
        if isinstance(cone, Cone):
            ray_idx = {r: i for i, r in enumerate(self.rays)}
            try:
                key = frozenset(ray_idx[r] for r in cone.rays)
            except KeyError:
                raise FanError(f"{cone} is not a cone of the fan") from None
        else:
            key = frozenset(cone)
        if key not in self.index:
            raise FanError(f"cone {sorted(key)} is not in the fan")
        return self.index[key]

    def dim(self, i: int) -> int:
        return self.cone(i).dim

    @cached_property
    def dims(self) -> tuple[int, ...]:
        return tuple(self.dim(i) for i in range(len(self.cones)))

    @cached_property
    def faces(self) -> tuple[frozenset, ...]:
        """For each cone, the ray-index sets of all its faces."""
        out = []
        for c in self.cones:
            m = sorted(c)
            fs = cone_faces([self.rays[i] for i in m], self.rank) if m else [frozenset()]
            out.append(frozenset(frozenset(m[i] for i in f) for f in fs))
        return tuple(out)

    def is_face(self, i: int, j: int) -> bool:
        """Cone i is a face of cone j."""
        return self.cones[i] in self.faces[j]

    def maximal(self) -> list[int]:
        return [i for i, c in enumerate(self.cones)
                if not any(c < d for d in self.cones)]

    def containing(self, i: int) -> list[int]:
        """Indices of cones having cone i as a face."""
        return [j for j in range(len(self.cones)) if self.is_face(i, j)]

    def contains_point(self, x) -> bool:
        return any(self.cone(i).contains(x) for i in self.maximal())

    def same_as(self, other: "Fan") -> bool:
        """Equality as sets of cones (independent of ray/cone ordering)."""
        if self.rank != other.rank:
            return False
        mine = {frozenset(self.rays[i] for i in c) for c in self.cones}
        theirs = {frozenset(other.rays[i] for i in c) for c in other.cones}
        return mine == theirs

    def __repr__(self):
        return f"Fan(rank={self.rank}, rays={list(map(list, self.rays))}, cones={[sorted(c) for c in self.cones]})"


# --------------------------------------------------------------------------
# validation


@dataclass
class Violation:
    kind: str
    detail: str
    cones: tuple = ()


@dataclass
class FanReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.violations

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}


def relints_meet(a: Sequence[Vector], b: Sequence[Vector], n: int):
    """Witness x in relint cone(a) & relint cone(b), or None.

    Strict positivity of coefficients is imposed as >= 1, which is
    equivalent for cones by scaling.
    """
    ka, kb = len(a), len(b)
    k = ka + kb
    if k == 0:
        return tuple([0] * n)
    A_eq = [[a[i][j] for i in range(ka)] + [-b[i][j] for i in range(kb)] for j in range(n)]
    A_ub = [[-int(i == j) for j in range(k)] for i in range(k)]
    sol = feasible_point(A_ub, [-1] * k, A_eq, [0] * n, k)
    if sol is None:
        return None
    return tuple(sum(sol[i] * a[i][j] for i in range(ka)) for j in range(n))


def validate_fan(F: Fan) -> FanReport:
    rep = FanReport()
    for i, r in enumerate(F.rays):
        if len(r) != F.rank:
            rep.violations.append(Violation("bad_dimension", f"ray {i} has length {len(r)}"))
            return rep
        g = vector_gcd(r)
        if g == 0:
            rep.violations.append(Violation("zero_ray", f"ray {i} is zero"))
        elif g != 1:
            rep.violations.append(Violation("non_primitive_ray", f"ray {i} = {list(r)} has gcd {g}"))
    if rep.violations:
        return rep
    if len(set(F.cones)) != len(F.cones):
        rep.violations.append(Violation("duplicate_cone", "a cone is listed twice"))
    present = set(F.cones)
    for i, c in enumerate(F.cones):
        gens = [F.rays[j] for j in sorted(c)]
        if not is_pointed(gens, F.rank):
            rep.violations.append(Violation("not_strongly_convex", f"cone {sorted(c)} contains a line", (i,)))
            continue
        for j in sorted(c):
            others = [F.rays[k] for k in sorted(c) if k != j]
            # a listed ray must be extreme in its cone
            if others and Cone(F.rank, tuple(others)).contains(F.rays[j]):
                rep.violations.append(Violation("redundant_ray", f"ray {j} is not extreme in cone {sorted(c)}", (i,)))
        for f in F.faces[i]:
            if f not in present:
                rep.violations.append(Violation("missing_face", f"face {sorted(f)} of cone {sorted(c)} is not in the fan", (i,)))
    if any(v.kind == "not_strongly_convex" for v in rep.violations):
        return rep
    for i, j in combinations(range(len(F.cones)), 2):
        a = [F.rays[k] for k in sorted(F.cones[i])]
        b = [F.rays[k] for k in sorted(F.cones[j])]
        if set(a) == set(b):
            continue
        w = relints_meet(a, b, F.rank)
        if w is not None:
            rep.violations.append(Violation(
                "overlapping_interiors",
                f"relative interiors of cones {sorted(F.cones[i])} and {sorted(F.cones[j])} meet at {[str(x) for x in w]}",
                (i, j)))
    return rep


def require_valid(F: Fan) -> None:
    rep = validate_fan(F)
    if not rep.valid:
        raise FanError("; ".join(v.detail for v in rep.violations))


def face_poset(F: Fan) -> Poset:
    """Cone indices ordered by the face relation."""
    return Poset.from_relation(range(len(F.cones)), F.is_face)


# --------------------------------------------------------------------------
# quotients


@dataclass(frozen=True)
class FanQuotient:
    """Sigma / sigma together with the projection M -> M/<sigma>."""

    fan: Fan
    cone_map: dict  # index of tau >= sigma in Sigma -> index of tau/<sigma>
    projection: IntMatrix


def quotient_fan(F: Fan, sigma: Cone | int | Iterable[int]) -> FanQuotient:
    s = sigma if isinstance(sigma, int) else F.find(sigma)
    r, P = quotient_lattice(F.rank, F.cone(s).span())
    return image_fan(F, s, P)


def image_fan(F: Fan, s: int, P: IntMatrix) -> FanQuotient:
    """Images of the cones tau >= sigma under a projection P killing <sigma>."""
    sig = F.cone(s)
    r = P.nrows
    sig_rays = F.cones[s]
    image_rays: list[Vector] = []
    ray_id: dict[Vector, int] = {}
    images: dict[int, frozenset] = {}
    d = sig.dim
    for t in F.containing(s):
        tau = F.cones[t]
        img = set()
        for face in F.faces[t]:
            if not sig_rays <= face or face == sig_rays:
                continue
            fc = Cone(F.rank, tuple(F.rays[k] for k in face))
            if fc.dim != d + 1:
                continue
            extra = next(iter(face - sig_rays))
            v = primitive(P @ F.rays[extra])
            if v not in ray_id:
                ray_id[v] = len(image_rays)
                image_rays.append(v)
            img.add(ray_id[v])
        images[t] = frozenset(img)
    cones = sorted(set(images.values()), key=lambda c: (len(c), sorted(c)))
    Q = Fan(r, tuple(image_rays), tuple(cones))
    cone_map = {t: Q.index[c] for t, c in images.items()}
    return FanQuotient(Q, cone_map, P)


# --------------------------------------------------------------------------
# completeness and duals


def is_complete(F: Fan) -> bool:
    """Support equals the whole space.

    Checked combinatorially: every maximal cone is full-dimensional, every
    (n-1)-cone is a face of exactly two maximal cones, and the maximal
    cones are connected through shared walls.
    """
    n = F.rank
    if n == 0:
        return True
    mx = F.maximal()
    if not mx or any(F.dims[i] != n for i in mx):
        return False
    walls = [i for i in range(len(F.cones)) if F.dims[i] == n - 1]
    if not walls:
        return False
    adj: dict[int, set[int]] = {i: set() for i in mx}
    for w in walls:
        over = [m for m in mx if F.is_face(w, m)]
        if len(over) != 2:
            return False
        a, b = over
        adj[a].add(b)
        adj[b].add(a)
    seen, stack = {mx[0]}, [mx[0]]
    while stack:
        for b in adj[stack.pop()]:
            if b not in seen:
                seen.add(b)
                stack.append(b)
    return len(seen) == len(mx)


def support_is_convex(F: Fan) -> bool:
    """|Sigma| is convex: pure of dimension d = rank(span) and every boundary
    wall supports all rays."""
    if not F.rays:
        return True
    d = rank(F.rays)
    mx = F.maximal()
    if any(F.dims[i] != d for i in mx):
        return False
    for w in range(len(F.cones)):
        if F.dims[w] != d - 1:
            continue
        over = [m for m in mx if F.is_face(w, m)]
        if len(over) != 1:
            continue
        top = F.cone(over[0])
        wall = F.cone(w)
        h = top.hrep
        for f, zs in zip(h.facets, h.facet_rays):
            on = {top.rays[k] for k in zs}
            if set(wall.rays) <= on and Cone(F.rank, tuple(on)).dim == d - 1:
                if any(dot(f, r) < 0 for r in F.rays):
                    return False
    return True


@dataclass(frozen=True)
class DualCone:
    """{u : <u, v> >= 0 for v in sigma} = cone(generators) + span(lineality)."""

    ambient: int
    generators: tuple[Vector, ...]
    lineality: tuple[Vector, ...]

    primal: tuple = field(default=(), repr=False)

    def contains(self, u) -> bool:
        """Exact membership via the primal rays."""
        return all(dot(u, r) >= 0 for r in self.primal)

    @property
    def dim(self) -> int:
        vs = list(self.generators) + list(self.lineality)
        return rank(vs) if vs else 0


def dual_cone(sigma: Cone) -> DualCone:
    h = sigma.hrep
    return DualCone(sigma.ambient, tuple(h.facets), tuple(h.equations), sigma.rays)


# --------------------------------------------------------------------------
# polytopes and normal fans


@dataclass(frozen=True)
class LatticePolytope:
    """Convex hull of its vertices; vertices stored as the extreme points."""

    rank: int
    vertices: tuple[tuple, ...]

    @classmethod
    def from_points(cls, rank: int, points: Iterable[Sequence]) -> "LatticePolytope":
        pts = []
        for p in points:
            q = tuple(as_fraction(a) for a in p)
            if len(q) != rank:
                raise FanError("point dimension mismatch")
            if q not in pts:
                pts.append(q)
        if not pts:
            raise FanError("empty polytope")
        if rank == 0:
            return cls(0, ((),))
        if rank_of_points(pts) < rank:
            return cls(rank, tuple(sorted(pts)))
        verts = [pts[i] for i in polytope_vertices(pts, rank)]
        return cls(rank, tuple(sorted(verts)))

    @property
    def full_dimensional(self) -> bool:
        return rank_of_points(self.vertices) == self.rank

    @property
    def is_lattice(self) -> bool:
        return all(a.denominator == 1 for v in self.vertices for a in v)

    @cached_property
    def hrep(self):
        if not self.full_dimensional:
            raise FanError("polytope is not full-dimensional")
        return polytope_hrep(self.vertices, self.rank)

    @cached_property
    def faces(self) -> list[frozenset]:
        """Nonempty faces as vertex-index sets."""
        return polytope_faces(self.vertices, self.rank)

    def contains(self, x) -> bool:
        return self.hrep.contains([as_fraction(a) for a in x])

    def scaled(self, l: int) -> "LatticePolytope":
        return LatticePolytope(self.rank, tuple(tuple(l * a for a in v) for v in self.vertices))

    def translated(self, t) -> "LatticePolytope":
        return LatticePolytope(self.rank, tuple(tuple(a + as_fraction(b) for a, b in zip(v, t))
                                                for v in self.vertices))


def rank_of_points(points) -> int:
    pts = list(points)
    if len(pts) <= 1:
        return 0
    p0 = pts[0]
    return rank([[a - b for a, b in zip(p, p0)] for p in pts[1:]])


@dataclass(frozen=True)
class NormalFan:
    """Inner normal fan with the face <-> cone correspondence."""

    fan: Fan
    polytope: LatticePolytope
    face_of_cone: dict  # cone index -> polytope face (vertex-index set)
    cone_of_face: dict


def normal_fan_data(Q: LatticePolytope) -> NormalFan:
    if not Q.full_dimensional:
        raise FanError("normal fan needs a full-dimensional polytope")
    if Q.rank == 0:
        F = Fan(0, (), (frozenset(),))
        return NormalFan(F, Q, {0: frozenset({0})}, {frozenset({0}): 0})
    h = Q.hrep
    rays = tuple(h.normals)
    cones = {}
    for face in Q.faces:
        cones[face] = frozenset(k for k, pts in enumerate(h.facet_points) if face <= pts)
    ordered = sorted(set(cones.values()), key=lambda c: (len(c), sorted(c)))
    F = Fan(Q.rank, rays, tuple(ordered))
    cone_of_face = {face: F.index[c] for face, c in cones.items()}
    face_of_cone = {i: f for f, i in cone_of_face.items()}
    return NormalFan(F, Q, face_of_cone, cone_of_face)


def normal_fan(Q: LatticePolytope) -> Fan:
    return normal_fan_data(Q).fan


def is_subfan(small: Fan, big: Fan) -> bool:
    if small.rank != big.rank:
        return False
    cones = {frozenset(big.rays[i] for i in c) for c in big.cones}
    return all(frozenset(small.rays[i] for i in c) in cones for c in small.cones)


def missing_cones(small: Fan, big: Fan) -> list[int]:
    cones = {frozenset(big.rays[i] for i in c) for c in big.cones}
    return [k for k, c in enumerate(small.cones)
            if frozenset(small.rays[i] for i in c) not in cones]


# --------------------------------------------------------------------------
# stacky fans


@dataclass(frozen=True)
class StackyFan:
    """beta: M~ -> M together with combinatorially equivalent fans.

    ``cone_map[i]`` is the index in ``fan`` matched with cone i of
    ``fan_tilde``.
    """

    beta: IntMatrix
    fan_tilde: Fan
    fan: Fan
    cone_map: tuple[int, ...]

    @classmethod
    def ordinary(cls, F: Fan) -> "StackyFan":
        return cls(IntMatrix.identity(F.rank), F, F, tuple(range(len(F.cones))))

    @classmethod
    def from_beta(cls, beta: IntMatrix, fan_tilde: Fan) -> "StackyFan":
        """Downstairs fan generated by the primitive images of the rays."""
        rays, rid = [], {}
        for r in fan_tilde.rays:
            v = primitive(beta @ r)
            if v not in rid:
                rid[v] = len(rays)
                rays.append(v)
        img = [frozenset(rid[primitive(beta @ fan_tilde.rays[i])] for i in c) for c in fan_tilde.cones]
        F = Fan(beta.nrows, tuple(rays), tuple(sorted(set(img), key=lambda c: (len(c), sorted(c)))))
        return cls(beta, fan_tilde, F, tuple(F.index[c] for c in img))


@dataclass
class StackyReport:
    violations: list[Violation] = field(default_factory=list)
    cokernel_torsion: tuple[int, ...] = ()

    @property
    def valid(self) -> bool:
        return not self.violations


def validate_stacky(SF: StackyFan) -> StackyReport:
    rep = StackyReport()
    beta = SF.beta
    if beta.ncols != SF.fan_tilde.rank or beta.nrows != SF.fan.rank:
        rep.violations.append(Violation("shape", f"beta has shape {beta.shape}"))
        return rep
    ck = cokernel(beta)
    rep.cokernel_torsion = ck.torsion
    if not ck.finite:
        rep.violations.append(Violation("infinite_cokernel", f"coker(beta) has free rank {ck.free_rank}"))
    for sub in (validate_fan(SF.fan_tilde), validate_fan(SF.fan)):
        rep.violations.extend(sub.violations)
    cm = SF.cone_map
    if len(cm) != len(SF.fan_tilde.cones) or sorted(cm) != list(range(len(SF.fan.cones))):
        rep.violations.append(Violation("bijection", "cone map is not a bijection"))
        return rep
    for i, j in enumerate(cm):
        img = {primitive(beta @ SF.fan_tilde.rays[k]) for k in SF.fan_tilde.cones[i]}
        target = {SF.fan.rays[k] for k in SF.fan.cones[j]}
        if img != target:
            rep.violations.append(Violation("bijection", f"beta(cone {i}) != cone {j}", (i, j)))
    for a in range(len(cm)):
        for b in range(len(cm)):
            if SF.fan_tilde.is_face(a, b) != SF.fan.is_face(cm[a], cm[b]):
                rep.violations.append(Violation("bijection", f"face order not preserved at ({a}, {b})", (a, b)))
    return rep
