"""Moment maps of polytopes and the dual stratified space of a fanifold.

Each 0-stratum P contributes the moment image of X_{Sigma_P} inside
l_P Q_P: the union of the faces of l_P Q_P dual to cones of Sigma_P. A
vertex of l_P Q_P whose maximal cone is missing from Sigma_P is pushed to
infinity, so the cells are realised as polyhedra with recession rays. The
charts are placed in a common ambient space through the transposed ambient
maps (u -> offset_P - A_P u) and glued along shared 0-cells.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Sequence

from .fan import Fan, FanError, LatticePolytope, is_subfan, missing_cones, normal_fan_data
from .fanifold import FanifoldData, FanifoldError
from .fltz import annihilator
from .lattice import IntMatrix, as_fraction, dot, primitive, solve, unimodular_inverse
from .polyhedra import feasible_point, in_cone
from .poset import Poset

QPoint = tuple[Fraction, ...]


class DualSpaceError(ValueError):
    pass


# --------------------------------------------------------------------------
# lattice points and moment maps


def lattice_points(Q: LatticePolytope) -> list[tuple[int, ...]]:
    """All integer points of Q, by bounding-box scan."""
    if Q.rank == 0:
        return [()]
    lo = [math.ceil(min(v[i] for v in Q.vertices)) for i in range(Q.rank)]
    hi = [math.floor(max(v[i] for v in Q.vertices)) for i in range(Q.rank)]
    if Q.full_dimensional:
        member = Q.contains
    else:
        verts = Q.vertices
        k = len(verts)

        def member(x):
            A_eq = [[v[j] for v in verts] for j in range(Q.rank)] + [[1] * k]
            A_ub = [[-int(i == j) for j in range(k)] for i in range(k)]
            return feasible_point(A_ub, [0] * k, A_eq, list(x) + [1], k) is not None
    return [p for p in product(*(range(a, b + 1) for a, b in zip(lo, hi))) if member(p)]


@dataclass(frozen=True)
class MomentContext:
    polytope: LatticePolytope
    scale: int = 1
    points: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self):
        if not self.polytope.full_dimensional:
            raise FanError("moment map needs a full-dimensional polytope")
        if not self.points:
            pts = lattice_points(self.polytope.scaled(self.scale))
            if not pts:
                raise FanError("polytope has no lattice points")
            object.__setattr__(self, "points", tuple(pts))

    @property
    def Q(self) -> LatticePolytope:
        return self.polytope.scaled(self.scale)


def _weight(x: Sequence, m: Sequence[int]):
    w = 1
    for xi, mi in zip(x, m):
        if mi:
            w = w * xi ** mi
    return w


def _moduli(x: Sequence) -> list:
    out = []
    for xi in x:
        if isinstance(xi, (int, Fraction)) or (isinstance(xi, str)):
            a = abs(as_fraction(xi))
        else:
            a = abs(complex(xi))
        if a == 0:
            raise ValueError("torus point has a zero coordinate")
        out.append(a)
    return out


def _average(points: Sequence[Sequence[int]], weights: Sequence) -> tuple:
    total = sum(weights)
    dim = len(points[0]) if points else 0
    return tuple(sum(w * p[j] for w, p in zip(weights, points)) / total for j in range(dim))


def algebraic_moment(ctx: MomentContext, x: Sequence) -> tuple:
    """Weighted average of the lattice points m with weights |chi^m(x)|.

    Exact (Fractions) when every |x_i| is rational, floats otherwise.
    """
    r = _moduli(x)
    if len(r) != ctx.polytope.rank:
        raise ValueError("torus point has the wrong dimension")
    return _average(ctx.points, [_weight(r, m) for m in ctx.points])


@dataclass(frozen=True)
class OrbitPoint:
    """A point of X_Sigma: the orbit of ``cone`` (ray vectors) and coordinates
    on its residual torus, in the basis of the annihilator lattice."""

    cone: tuple[tuple[int, ...], ...]
    coords: tuple


def face_points(ctx: MomentContext, cone_rays: Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
    """Lattice points of the face of l Q dual to the cone (inner normals)."""
    if not cone_rays:
        return list(ctx.points)
    v = [sum(r[j] for r in cone_rays) for j in range(ctx.polytope.rank)]
    vals = [dot(v, m) for m in ctx.points]
    lo = min(vals)
    return [m for m, a in zip(ctx.points, vals) if a == lo]


def mom_Q(ctx: MomentContext, x) -> tuple:
    """The moment map on X_Sigma: torus points or orbit points."""
    if not isinstance(x, OrbitPoint):
        return algebraic_moment(ctx, x)
    from .fan import Cone

    n = ctx.polytope.rank
    cone = Cone(n, tuple(tuple(r) for r in x.cone))
    nf = normal_fan_data(ctx.Q)
    cones = {frozenset(nf.fan.rays[i] for i in c) for c in nf.fan.cones}
    if frozenset(cone.rays) not in cones:
        raise ValueError(f"{cone} is not a cone of the normal fan")
    pts = face_points(ctx, cone.rays)
    ann = annihilator(cone)
    basis = ann.generators()
    if len(x.coords) != len(basis):
        raise ValueError(f"orbit of {cone} has a rank-{len(basis)} torus")
    r = _moduli(x.coords) if basis else []
    base = pts[0]
    weights = []
    for m in pts:
        diff = [a - b for a, b in zip(m, base)]
        c = solve([[b[j] for b in basis] for j in range(n)], diff) if basis else []
        weights.append(_weight(r, [int(a) for a in c]))
    return _average(pts, weights)


def very_ample_check(Q: LatticePolytope, l: int = 1):
    """True in dimension <= 2; otherwise the declared scale is recorded."""
    if not Q.full_dimensional:
        raise FanError("polytope is not full-dimensional")
    if Q.rank <= 2:
        return True
    return f"assumed(l={l})"


# --------------------------------------------------------------------------
# condition (vi)


@dataclass
class ConditionReport:
    failures: list[tuple[str, str]] = field(default_factory=list)
    very_ample: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.failures

    def kinds(self) -> set[str]:
        return {k for k, _ in self.failures}


def zero_strata(phi: FanifoldData) -> list[str]:
    return [s.id for s in phi.strata if s.dim == 0]


def _cone_image(phi: FanifoldData, P: str, S: str, T: str) -> set:
    """Rays of q_{P->S}(sigma^P_T) in M_S."""
    a, b = phi.arrow(P, S), phi.arrow(P, T)
    F = phi.fans[P]
    out = set()
    for k in b.cone - a.cone:
        v = a.quotient @ F.rays[k]
        if any(v):
            out.add(primitive(v))
    return out


def condition_vi_check(phi: FanifoldData, polytopes: dict, scales: dict | None = None,
                       identifications: dict | None = None) -> ConditionReport:
    """Check the polytope/gluing condition needed for the dual space.

    ``identifications[(S, P, P2)]`` is an automorphism of the dual lattice
    of M_S identifying the cones seen from P and from P2 (default identity).
    """
    rep = ConditionReport()
    scales = scales or {}
    identifications = identifications or {}
    zs = zero_strata(phi)
    if not zs:
        rep.failures.append(("no_vertices", "the fanifold has no 0-strata, so there are no charts"))
    for s in phi.strata:
        if s.dim > 0 and not any(phi.arrow(P, s.id) for P in zs):
            rep.failures.append(("uncovered", f"stratum {s.id} has no 0-stratum in its closure"))
    for P in zs:
        if P not in polytopes:
            rep.failures.append(("missing_polytope", f"no polytope for {P}"))
            continue
        Q = polytopes[P]
        l = scales.get(P, 1)
        if Q.rank != phi.fans[P].rank or not Q.full_dimensional or not Q.is_lattice:
            rep.failures.append(("bad_polytope", f"Q_{P} is not a full-dimensional lattice polytope in M_{P}"))
            continue
        NF = normal_fan_data(Q).fan
        if not is_subfan(phi.fans[P], NF):
            miss = [sorted(phi.fans[P].cones[k]) for k in missing_cones(phi.fans[P], NF)]
            rep.failures.append(("not_subfan", f"Sigma_{P} cones {miss} are not in the normal fan of Q_{P}"))
        rep.very_ample[P] = very_ample_check(Q.scaled(l), l)
    # identifications on shared strata
    ident = {}
    for s in phi.strata:
        below = [P for P in zs if phi.arrow(P, s.id)]
        for P, P2 in ((a, b) for a in below for b in below if a != b):
            r = phi.fans[s.id].rank
            g = identifications.get((s.id, P, P2), IntMatrix.identity(r))
            ident[(s.id, P, P2)] = g
            if g.shape != (r, r) or not g.is_unimodular():
                rep.failures.append(("not_isomorphism", f"identification for {s.id} from {P} to {P2} is not unimodular"))
                continue
            # g acts on the dual lattice; cones move by the inverse transpose
            h = unimodular_inverse(g).T
            for t in phi.above(s.id):
                if not phi.arrow(P, t) or not phi.arrow(P2, t):
                    continue
                A, B = _cone_image(phi, P, s.id, t), _cone_image(phi, P2, s.id, t)
                if {primitive(h @ a) for a in A} != B:
                    rep.failures.append(("non_commuting", f"identification for {s.id} ({P} -> {P2}) "
                                         f"does not match the cones of {t}"))
    for (S, P, P2), g in ident.items():
        for P3 in zs:
            if P3 in (P, P2) or (S, P2, P3) not in ident:
                continue
            if ident[(S, P2, P3)] @ g != ident[(S, P, P3)]:
                rep.failures.append(("cocycle", f"identifications for {S} break the cocycle on {P}, {P2}, {P3}"))
        for a in phi.arrows:
            if a.src != S or (a.dst, P, P2) not in ident:
                continue
            qT = a.quotient.T
            if g @ qT != qT @ ident[(a.dst, P, P2)]:
                rep.failures.append(("non_commuting", f"identifications for {S} and {a.dst} ({P} -> {P2}) "
                                     f"do not commute with the dual inclusion"))
    return rep


# --------------------------------------------------------------------------
# the dual complex


@dataclass(frozen=True)
class DualCell:
    label: str
    stratum: str | None
    dim: int
    vertices: tuple[QPoint, ...]
    rays: tuple[tuple[int, ...], ...]
    level: int = 0  # dim of the dual stratum of Phi; chart-only cells sit at 0


@dataclass
class DualComplex:
    ambient: int
    cells: list[DualCell]
    incidence: set  # (a, b): cell a lies in the closure of cell b, a != b

    @property
    def dim(self) -> int:
        return max((c.dim for c in self.cells), default=0)

    def cell(self, label: str) -> DualCell:
        for c in self.cells:
            if c.label == label:
                return c
        raise KeyError(label)

    def cell_of(self, sid: str) -> DualCell:
        for c in self.cells:
            if c.stratum == sid:
                return c
        raise FanifoldError(f"no dual cell for stratum {sid!r}")

    def poset(self) -> Poset:
        labels = [c.label for c in self.cells]
        return Poset.from_relation(labels, lambda a, b: a == b or (a, b) in self.incidence)


def _dual_label(sid: str) -> str:
    return f"{sid}^perp"


def _chart_cells(phi: FanifoldData, P: str, Q: LatticePolytope):
    """Cells of chart P in its own dual lattice coordinates."""
    F = phi.fans[P]
    nfd = normal_fan_data(Q)
    NF = nfd.fan
    by_rays = {frozenset(NF.rays[i] for i in c): k for k, c in enumerate(NF.cones)}
    present = set()
    for c in F.cones:
        k = by_rays[frozenset(F.rays[i] for i in c)]
        face = nfd.face_of_cone[k]
        if len(face) == 1:
            present |= face
    stratum_of = {frozenset(): P}
    for a in phi.arrows:
        if a.src == P:
            stratum_of[a.cone] = a.dst
    edges = [f for f in Q.faces if len(f) == 2 and
             len({Q.vertices[i] for i in f}) == 2]
    cells = {}
    for i, c in enumerate(F.cones):
        face = nfd.face_of_cone[by_rays[frozenset(F.rays[j] for j in c)]]
        sid = stratum_of.get(c)
        label = _dual_label(sid) if sid else f"{P}:{sorted(c)}^perp"
        verts = sorted(face & present)
        dirs = []
        for e in edges:
            if e <= face:
                a, b = sorted(e)
                for p, q in ((a, b), (b, a)):
                    if p in present and q not in present:
                        dirs.append(tuple(x - y for x, y in zip(Q.vertices[q], Q.vertices[p])))
        cells[label] = (sid, F.rank - F.dims[i], [Q.vertices[v] for v in verts], dirs, face)
    return cells


def _place(A: IntMatrix, offset: QPoint, u) -> QPoint:
    Au = A @ tuple(u) if A.ncols else tuple([0] * A.nrows)
    return tuple(o - a for o, a in zip(offset, Au))


def _dir(A: IntMatrix, d) -> tuple[int, ...]:
    return primitive(tuple(-a for a in (A @ tuple(d))))


def _same_cone(r1, r2) -> bool:
    return all(in_cone(r, r2) for r in r1) and all(in_cone(r, r1) for r in r2)


def dual_space(phi: FanifoldData, polytopes: dict, scales: dict | None = None,
               identifications: dict | None = None, anchor: Sequence | None = None,
               check: bool = True) -> DualComplex:
    """Glue the moment images of X_{Sigma_P} into the dual complex Psi."""
    scales = scales or {}
    if check:
        rep = condition_vi_check(phi, polytopes, scales, identifications)
        if not rep.ok:
            raise DualSpaceError("; ".join(d for _, d in rep.failures))
    zs = zero_strata(phi)
    if phi.ambient is not None:
        N, maps = phi.ambient
    else:
        ranks = {phi.fans[P].rank for P in zs}
        if len(ranks) != 1:
            raise DualSpaceError("charts of different rank need ambient maps")
        N = ranks.pop()
        maps = {P: IntMatrix.identity(N) for P in zs}
    A = {P: maps[P].T for P in zs}
    charts = {P: _chart_cells(phi, P, polytopes[P].scaled(scales.get(P, 1))) for P in zs}

    def points0(P):
        return {lab: c[2][0] for lab, c in charts[P].items() if c[1] == 0 and c[2]}

    offsets: dict[str, QPoint] = {}
    for root in zs:
        if root in offsets:
            continue
        pts = points0(root)
        base = tuple([Fraction(0)] * N)
        if anchor is not None and not offsets:
            lab, u = next(iter(pts.items()))
            target = tuple(as_fraction(a) for a in anchor)
            base = tuple(t + a for t, a in zip(target, A[root] @ tuple(u)))
        elif phi.geometry and not offsets:
            for lab, u in pts.items():
                sid = charts[root][lab][0]
                if sid in phi.geometry and len(phi.geometry[sid][0]) == N:
                    g = phi.geometry[sid]
                    target = tuple(sum(p[j] for p in g) / len(g) for j in range(N))
                    base = tuple(t + a for t, a in zip(target, A[root] @ tuple(u)))
                    break
        offsets[root] = base
        queue = deque([root])
        while queue:
            P = queue.popleft()
            here = {lab: _place(A[P], offsets[P], u) for lab, u in points0(P).items()}
            for P2 in zs:
                if P2 in offsets:
                    continue
                shared = [lab for lab in points0(P2) if lab in here]
                if not shared:
                    continue
                lab = shared[0]
                u = points0(P2)[lab]
                offsets[P2] = tuple(x + a for x, a in zip(here[lab], A[P2] @ tuple(u)))
                queue.append(P2)

    cells: dict[str, DualCell] = {}
    faces_by_chart = {}
    for P in zs:
        faces_by_chart[P] = {}
        for lab, (sid, dim, verts, dirs, face) in charts[P].items():
            v = tuple(sorted(_place(A[P], offsets[P], u) for u in verts))
            r = tuple(sorted({_dir(A[P], d) for d in dirs}))
            faces_by_chart[P][lab] = face
            level = phi.stratum(sid).dim if sid is not None else 0
            cell = DualCell(lab, sid, dim, v, r, level)
            if lab in cells:
                old = cells[lab]
                if old.vertices != v or old.dim != dim or not _same_cone(old.rays, r):
                    raise DualSpaceError(f"charts disagree on the cell {lab}")
            else:
                cells[lab] = cell
    incidence = set()
    for P in zs:
        fs = faces_by_chart[P]
        for a, fa in fs.items():
            for b, fb in fs.items():
                if a != b and fa < fb:
                    incidence.add((a, b))
    return DualComplex(N, list(cells.values()), incidence)


def dual_filtration(psi: DualComplex) -> list[list[str]]:
    """Psi_k = the duals of the strata of Phi of dim <= k (chart-only cells
    belong to stage 0)."""
    top = max((c.level for c in psi.cells), default=0)
    return [[c.label for c in psi.cells if c.level <= k] for k in range(top + 1)]
