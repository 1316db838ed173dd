"""Combinatorial fanifolds: strata, exit arrows carrying quotient data, and
the constructions built on them (filtration, closedness, sphere fanifolds,
handle schedules).

A fanifold is encoded purely on the lattice side. Each stratum S carries a
fan Sigma_S in a lattice M_S = Z^r; each exit arrow S -> S' carries the cone
sigma in Sigma_S that S' corresponds to and an integer surjection
M_S -> M_S' whose kernel is <sigma>.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from .fan import (
    Cone,
    Fan,
    FanError,
    FanQuotient,
    StackyFan,
    face_poset,
    image_fan,
    quotient_fan,
    validate_fan,
)
from .lattice import IntMatrix, cokernel, factor_through, integer_kernel, primitive
from .poset import Poset

IN, OUT = "in", "out"


class FanifoldError(ValueError):
    pass


@dataclass(frozen=True)
class Stratum:
    """One stratum. ``facets`` pairs a frontier stratum id (None for an ideal
    boundary piece at infinity) with its "in"/"out" flag."""

    id: str
    dim: int
    label: str = ""
    interior: bool = True
    facets: tuple[tuple[str | None, str], ...] = ()


@dataclass(frozen=True)
class Arrow:
    src: str
    dst: str
    cone: frozenset  # ray indices into the fan of src
    quotient: IntMatrix  # M_src -> M_dst


@dataclass(frozen=True)
class FanifoldData:
    strata: tuple[Stratum, ...]
    fans: dict
    arrows: tuple[Arrow, ...]
    geometry: dict | None = None  # stratum id -> list of rational points
    ambient: tuple[int, dict] | None = None  # (N, {0-stratum id: Z^N -> M_P})

    def stratum(self, sid: str) -> Stratum:
        for s in self.strata:
            if s.id == sid:
                return s
        raise FanifoldError(f"unknown stratum {sid!r}")

    @property
    def ids(self) -> list[str]:
        return [s.id for s in self.strata]

    @property
    def dim(self) -> int:
        return max((s.dim for s in self.strata), default=-1)

    def lattice_rank(self, sid: str) -> int:
        return self.fans[sid].rank

    def arrow(self, src: str, dst: str) -> Arrow | None:
        for a in self.arrows:
            if a.src == src and a.dst == dst:
                return a
        return None

    def below(self, sid: str) -> list[str]:
        """Strata with an exit arrow into ``sid``."""
        return [a.src for a in self.arrows if a.dst == sid]

    def above(self, sid: str) -> list[str]:
        return [a.dst for a in self.arrows if a.src == sid]

    def poset(self) -> Poset:
        arr = {(a.src, a.dst) for a in self.arrows}
        return Poset.from_relation(self.ids, lambda x, y: x == y or (x, y) in arr)

    def by_dim(self) -> list[Stratum]:
        return sorted(self.strata, key=lambda s: (s.dim, self.ids.index(s.id)))


# --------------------------------------------------------------------------
# validation


@dataclass
class Failure:
    kind: str
    detail: str
    arrows: tuple = ()


@dataclass
class FanifoldReport:
    failures: list[Failure] = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return not self.failures

    def kinds(self) -> set[str]:
        return {f.kind for f in self.failures}


def _check_arrow(phi: FanifoldData, a: Arrow) -> list[Failure]:
    out = []
    tag = ((a.src, a.dst),)
    if a.src not in phi.fans or a.dst not in phi.fans:
        return [Failure("unknown_stratum", f"arrow {a.src}->{a.dst} references a missing stratum", tag)]
    S, T = phi.stratum(a.src), phi.stratum(a.dst)
    if T.dim <= S.dim:
        out.append(Failure("dimension", f"arrow {a.src}->{a.dst} does not increase dimension", tag))
    F, G = phi.fans[a.src], phi.fans[a.dst]
    q = a.quotient
    if q.shape != (G.rank, F.rank):
        return out + [Failure("shape", f"quotient {a.src}->{a.dst} has shape {q.shape}, "
                              f"expected {(G.rank, F.rank)}", tag)]
    if a.cone not in F.index:
        return out + [Failure("missing_cone", f"arrow {a.src}->{a.dst} cone {sorted(a.cone)} is not in Sigma_{a.src}", tag)]
    s = F.index[a.cone]
    sigma = F.cone(s)
    if G.rank != F.rank - sigma.dim:
        out.append(Failure("rank", f"rank M_{a.dst} = {G.rank} but rank M_{a.src} - dim sigma = "
                           f"{F.rank - sigma.dim}", tag))
        return out
    ck = cokernel(q) if q.nrows else None
    if ck is not None and (not ck.finite or ck.torsion):
        out.append(Failure("not_surjective", f"quotient {a.src}->{a.dst} is not onto", tag))
        return out
    if integer_kernel(q).rank != sigma.dim or any(any(q @ r) for r in sigma.rays):
        out.append(Failure("kernel", f"kernel of quotient {a.src}->{a.dst} is not <sigma>", tag))
        return out
    img = image_fan(F, s, q).fan
    if not img.same_as(G):
        out.append(Failure("quotient_mismatch",
                           f"q_{a.src}->{a.dst} sends Sigma_{a.src}/sigma to {img}, not Sigma_{a.dst}", tag))
    return out


# arrow failures after which composing the arrow is meaningless
_STRUCTURAL = {"unknown_stratum", "shape", "missing_cone", "rank", "not_surjective", "kernel"}


def validate_fanifold(phi: FanifoldData) -> FanifoldReport:
    rep = FanifoldReport()
    ids = phi.ids
    if len(set(ids)) != len(ids):
        rep.failures.append(Failure("duplicate_id", "stratum ids are not unique"))
    for s in phi.strata:
        if s.id not in phi.fans:
            rep.failures.append(Failure("missing_fan", f"stratum {s.id} has no fan"))
            continue
        fr = validate_fan(phi.fans[s.id])
        for v in fr.violations:
            rep.failures.append(Failure("invalid_fan", f"Sigma_{s.id}: {v.detail}"))
    if rep.failures:
        return rep
    seen, broken = set(), set()
    for a in phi.arrows:
        if (a.src, a.dst) in seen:
            rep.failures.append(Failure("duplicate_arrow", f"two arrows {a.src}->{a.dst}", ((a.src, a.dst),)))
        seen.add((a.src, a.dst))
        fails = _check_arrow(phi, a)
        rep.failures.extend(fails)
        if any(f.kind in _STRUCTURAL for f in fails):
            broken.add((a.src, a.dst))
    # (b) commutativity on composable pairs
    for a in phi.arrows:
        for b in phi.arrows:
            if a.dst != b.src:
                continue
            c = phi.arrow(a.src, b.dst)
            pair = ((a.src, a.dst), (b.src, b.dst))
            if c is None:
                rep.failures.append(Failure("missing_composite",
                                            f"no arrow {a.src}->{b.dst} composing {a.src}->{a.dst}->{b.dst}", pair))
                continue
            if {(a.src, a.dst), (b.src, b.dst), (c.src, c.dst)} & broken:
                continue
            if b.quotient @ a.quotient != c.quotient:
                rep.failures.append(Failure("commutativity",
                                            f"q_{a.src}->{b.dst} != q_{b.src}->{b.dst} . q_{a.src}->{a.dst}",
                                            pair + ((c.src, c.dst),)))
            F = phi.fans[a.src]
            if a.cone in F.index and c.cone in F.index:
                if not F.is_face(F.index[a.cone], F.index[c.cone]):
                    rep.failures.append(Failure("cone_order", f"sigma_{a.src}->{a.dst} is not a face of "
                                                f"sigma_{a.src}->{b.dst}", pair))
                else:
                    img = image_fan(F, F.index[a.cone], a.quotient)
                    G = phi.fans[a.dst]
                    got = img.fan.cones[img.cone_map[F.index[c.cone]]]
                    got_rays = {img.fan.rays[k] for k in got}
                    want = {G.rays[k] for k in b.cone if k < len(G.rays)}
                    if got_rays != want:
                        rep.failures.append(Failure("cone_image", f"q_{a.src}->{a.dst}(sigma_{a.src}->{b.dst}) "
                                                    f"!= sigma_{a.dst}->{b.dst}", pair))
    # (c) boundary facets
    for s in phi.strata:
        for fid, flag in s.facets:
            if flag not in (IN, OUT):
                rep.failures.append(Failure("facet_flag", f"stratum {s.id} facet flag {flag!r}"))
            if fid is None:
                if flag != OUT:
                    rep.failures.append(Failure("facet", f"ideal facet of {s.id} must be 'out'"))
                continue
            if fid not in ids:
                rep.failures.append(Failure("facet", f"stratum {s.id} facet {fid} does not exist"))
                continue
            if phi.arrow(fid, s.id) is None:
                rep.failures.append(Failure("facet", f"facet {fid} of {s.id} has no exit arrow into it"))
            if phi.stratum(fid).dim >= s.dim:
                rep.failures.append(Failure("facet", f"facet {fid} of {s.id} is not of lower dimension"))
        if s.interior != all(flag == IN for _, flag in s.facets):
            rep.failures.append(Failure("interior_flag", f"stratum {s.id} interior flag disagrees with its facets"))
    return rep


def require_valid(phi: FanifoldData) -> None:
    rep = validate_fanifold(phi)
    if not rep.valid:
        raise FanifoldError("; ".join(f.detail for f in rep.failures))


# --------------------------------------------------------------------------
# filtration, closedness, handle schedule


@dataclass(frozen=True)
class GluingDiagram:
    """Stage k: Phi_k = Phi_{k-1} glued to the new pieces Sigma_S x S along
    Sigma_S x d_in S."""

    stage: int
    pieces: tuple[tuple[str, Fan], ...]
    interfaces: tuple[tuple[str, tuple[str, ...]], ...]
    strata: tuple[str, ...]  # every stratum present at this stage


def in_boundary(phi: FanifoldData, sid: str) -> list[str]:
    """Strata making up d_in S: the 'in' facets and everything below them."""
    out: list[str] = []
    todo = [f for f, flag in phi.stratum(sid).facets if f is not None and flag == IN]
    while todo:
        f = todo.pop()
        if f in out:
            continue
        out.append(f)
        todo.extend(phi.below(f))
    return sorted(out, key=phi.ids.index)


def filtration(phi: FanifoldData) -> list[GluingDiagram]:
    stages = []
    present: list[str] = []
    for k in range(phi.dim + 1):
        new = [s for s in phi.by_dim() if s.dim == k]
        present = present + [s.id for s in new]
        pieces = tuple((s.id, phi.fans[s.id]) for s in new)
        faces = tuple((s.id, tuple(f for f, flag in s.facets if f is not None and flag == IN))
                      for s in new)
        stages.append(GluingDiagram(k, pieces, faces if k else (), tuple(present)))
    return stages


def is_closed(phi: FanifoldData) -> bool:
    """All strata interior (every boundary facet points inward)."""
    for s in phi.strata:
        if s.interior != all(flag == IN for _, flag in s.facets):
            raise FanifoldError(f"stratum {s.id}: interior flag inconsistent with facet data")
    return all(s.interior for s in phi.strata)


@dataclass(frozen=True)
class HandleRecord:
    stage: int
    stratum: str
    torus_rank: int
    base: str
    gluing_locus: tuple[tuple[str, tuple], ...]  # (lower stratum, cone rays in its lattice)


def handle_schedule(phi: FanifoldData) -> list[HandleRecord]:
    out = []
    for s in phi.by_dim():
        locus = []
        for r in in_boundary(phi, s.id):
            a = phi.arrow(r, s.id)
            if a is None:
                continue
            F = phi.fans[r]
            locus.append((r, tuple(F.rays[k] for k in sorted(a.cone))))
        out.append(HandleRecord(s.dim, s.id, phi.lattice_rank(s.id), f"{s.id}_o", tuple(locus)))
    return out


# --------------------------------------------------------------------------
# constructions


def trivial_fanifold(dim: int = 0, sid: str = "S") -> FanifoldData:
    """A manifold with its trivial stratification: one stratum, M = 0."""
    st = Stratum(sid, dim, "trivial", True, ())
    return FanifoldData((st,), {sid: Fan(0, (), (frozenset(),))}, ())


def _quotient_map(P_src: IntMatrix, P_dst: IntMatrix) -> IntMatrix:
    g = factor_through(P_src, P_dst)
    if g is None:
        raise FanifoldError("quotient maps do not factor")
    return g


def fan_fanifold(F: Fan) -> FanifoldData:
    """The fan itself, stratified by relative interiors of its cones."""
    quots: dict[int, FanQuotient] = {i: quotient_fan(F, i) for i in range(len(F.cones))}
    sid = {i: f"c{i}" for i in range(len(F.cones))}
    strata, arrows = [], []
    for i, c in enumerate(F.cones):
        facets = [(sid[F.index[f]], IN) for f in sorted(F.faces[i], key=sorted)
                  if f != c and f in F.index and F.dims[F.index[f]] == F.dims[i] - 1]
        if c:
            facets.append((None, OUT))
        strata.append(Stratum(sid[i], F.dims[i], f"relint cone{sorted(c)}",
                              all(fl == IN for _, fl in facets), tuple(facets)))
    for i in range(len(F.cones)):
        for j in F.containing(i):
            if j == i:
                continue
            qi = quots[i]
            arrows.append(Arrow(sid[i], sid[j], qi.fan.cones[qi.cone_map[j]],
                                _quotient_map(qi.projection, quots[j].projection)))
    return FanifoldData(tuple(strata), {sid[i]: quots[i].fan for i in quots}, tuple(arrows))


def sphere_fanifold(sigma: Fan | StackyFan, check: bool = True) -> FanifoldData:
    """Sigma intersected with the unit sphere: one (dim sigma - 1)-stratum per
    nonzero cone, with normal fan Sigma/sigma.

    Faces missing from the cone list (e.g. deleted rays) become ideal 'out'
    boundary pieces. ``check=False`` skips fan validation so that such
    punctured cone collections can be passed.
    """
    F = sigma.fan if isinstance(sigma, StackyFan) else sigma
    if F.rank == 0:
        raise FanifoldError("sphere fanifold of a rank-0 fan is empty")
    if check:
        rep = validate_fan(F)
        if not rep.valid:
            raise FanError("; ".join(v.detail for v in rep.violations))
    nonzero = [i for i, c in enumerate(F.cones) if c]
    quots = {i: quotient_fan(F, i) for i in nonzero}
    sid = {i: "s" + "_".join(str(k) for k in sorted(F.cones[i])) for i in nonzero}
    strata, arrows = [], []
    for i in nonzero:
        d = F.dims[i]
        facets = []
        if d > 1:
            for f in sorted(F.faces[i], key=sorted):
                if not f or Cone(F.rank, tuple(F.rays[k] for k in f)).dim != d - 1:
                    continue
                facets.append((sid[F.index[f]], IN) if f in F.index else (None, OUT))
        strata.append(Stratum(sid[i], d - 1, f"cone{sorted(F.cones[i])}",
                              all(fl == IN for _, fl in facets), tuple(facets)))
        for j in F.containing(i):
            if j == i:
                continue
            qi = quots[i]
            arrows.append(Arrow(sid[i], sid[j], qi.fan.cones[qi.cone_map[j]],
                                _quotient_map(qi.projection, quots[j].projection)))
    strata.sort(key=lambda s: (s.dim, s.id))
    ambient = (F.rank, {sid[i]: quots[i].projection for i in nonzero if F.dims[i] == 1})
    return FanifoldData(tuple(strata), {sid[i]: quots[i].fan for i in nonzero}, tuple(arrows),
                        ambient=ambient)


# --------------------------------------------------------------------------
# Exit(Sigma) versus quotient fans under Sigma


@dataclass
class ExitIso:
    ok: bool
    face_poset: Poset
    quotient_poset: Poset
    mapping: dict
    failures: list[str] = field(default_factory=list)


def _under_le(F: Fan, quots: dict, a: int, b: int) -> bool:
    """Is there a Fan-quotient morphism Sigma/a -> Sigma/b under Sigma?

    A morphism out of Sigma/a is a cone c of Sigma/a plus an isomorphism
    (Sigma/a)/c = Sigma/b; the composite Sigma -> Sigma/b must have cone b and
    the same lattice projection.
    """
    qa, qb = quots[a], quots[b]
    pre = {c: t for t, c in qa.cone_map.items()}
    for c in range(len(qa.fan.cones)):
        if F.cones[pre[c]] != F.cones[b]:
            continue
        qc = quotient_fan(qa.fan, c)
        g = factor_through(qc.projection @ qa.projection, qb.projection)
        if g is None or not g.is_unimodular():
            continue
        moved = Fan(qb.fan.rank, tuple(primitive(g @ r) for r in qc.fan.rays), qc.fan.cones)
        if moved.same_as(qb.fan):
            return True
    return False


def exit_poset_iso(F: Fan) -> ExitIso:
    """Check Exit(Sigma) = face poset is order-isomorphic to the quotient fans
    of Sigma ordered by further quotienting, via sigma -> Sigma/sigma."""
    fp = face_poset(F)
    quots = {i: quotient_fan(F, i) for i in range(len(F.cones))}
    objs = [f"Sigma/{sorted(c)}" for c in F.cones]
    qp = Poset.from_relation(objs, lambda x, y: _under_le(F, quots, objs.index(x), objs.index(y)))
    mapping = {i: objs[i] for i in range(len(F.cones))}
    failures = []
    if not qp.is_partial_order():
        failures.append("quotient relation is not a partial order")
    for a in fp.elements:
        for b in fp.elements:
            if fp.le(a, b) != qp.le(mapping[a], mapping[b]):
                failures.append(f"order mismatch at cones {sorted(F.cones[a])}, {sorted(F.cones[b])}")
    return ExitIso(not failures and fp.is_order_isomorphism(qp, mapping), fp, qp, mapping, failures)
