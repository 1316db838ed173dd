"""Small named fans, polytopes and fanifolds used in tests, examples and the CLI."""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations

from .fan import Fan, LatticePolytope, StackyFan
from .fanifold import IN, OUT, Arrow, FanifoldData, Stratum
from .lattice import IntMatrix


def unit(n: int, i: int) -> tuple[int, ...]:
    return tuple(int(j == i) for j in range(n))


def affine_space(n: int) -> Fan:
    """Fan of A^n: the positive orthant with all its faces."""
    return Fan.from_maximal(n, [unit(n, i) for i in range(n)], [range(n)])


def projective_space(n: int) -> Fan:
    rays = [unit(n, i) for i in range(n)] + [tuple([-1] * n)]
    return Fan.from_maximal(n, rays, combinations(range(n + 1), n))


def p1() -> Fan:
    return projective_space(1)


def half_plane() -> Fan:
    """Upper half plane {y >= 0} as the union of two quadrants."""
    return Fan.from_maximal(2, [(1, 0), (0, 1), (-1, 0)], [(0, 1), (1, 2)])


def affine_minus_rays(n: int = 3) -> Fan:
    """Fan of A^n with the rays deleted: a face-incomplete cone collection."""
    full = affine_space(n)
    keep = tuple(c for c in full.cones if len(c) != 1)
    return Fan(n, full.rays, keep)


def stacky_a1(k: int = 2) -> StackyFan:
    """beta = (k): Z -> Z over the fan of A^1."""
    return StackyFan.from_beta(IntMatrix.from_rows([[k]]), affine_space(1))


def stacky_diag() -> StackyFan:
    """beta = diag(1, 2) with upstairs ray (0, 1) mapping to (0, 2)."""
    up = Fan.from_maximal(2, [(0, 1)], [(0,)])
    return StackyFan.from_beta(IntMatrix.from_rows([[1, 0], [0, 2]]), up)


def unit_interval() -> LatticePolytope:
    return LatticePolytope.from_points(1, [(0,), (1,)])


def unit_square() -> LatticePolytope:
    return LatticePolytope.from_points(2, [(0, 0), (1, 0), (0, 1), (1, 1)])


def standard_simplex(n: int, scale: int = 1) -> LatticePolytope:
    return LatticePolytope.from_points(n, [tuple([0] * n)] + [tuple(scale * a for a in unit(n, i))
                                                             for i in range(n)])


# --------------------------------------------------------------------------
# the closed square

SQUARE_VERTICES = {"P1": (0, 1), "P2": (0, 0), "P3": (1, 0), "P4": (1, 1)}
SQUARE_EDGES = {"I12": ("P1", "P2"), "I23": ("P2", "P3"), "I34": ("P3", "P4"), "I14": ("P1", "P4")}

# rays at each vertex point along its two edges, into the square
_SQUARE_RAYS = {
    "P1": {"I12": (0, -1), "I14": (1, 0)},
    "P2": {"I12": (0, 1), "I23": (1, 0)},
    "P3": {"I23": (-1, 0), "I34": (0, 1)},
    "P4": {"I34": (0, -1), "I14": (-1, 0)},
}
# M_P -> M_I, one per edge; the same map works from both endpoints
_SQUARE_Q = {"I12": [[1, 0]], "I23": [[0, 1]], "I34": [[-1, 0]], "I14": [[0, -1]]}
# extra rays completing Sigma_P to the normal fan of Q_P
SQUARE_EXTRA_RAYS = {"P1": (-1, 1), "P2": (-1, -1), "P3": (1, -1), "P4": (1, 1)}


def square_fanifold() -> FanifoldData:
    """The closed unit square stratified by 4 vertices, 4 edges and the face F."""
    fans, strata, arrows = {}, [], []
    a1 = Fan(1, ((1,),), (frozenset(), frozenset({0})))
    for p, rays in _SQUARE_RAYS.items():
        edges = list(rays)
        fans[p] = Fan.from_maximal(2, [rays[e] for e in edges], [(0, 1)])
        strata.append(Stratum(p, 0, f"vertex {p}", True, ()))
    for e, (p, q) in SQUARE_EDGES.items():
        fans[e] = a1
        strata.append(Stratum(e, 1, f"edge {e}", True, ((p, IN), (q, IN))))
    fans["F"] = Fan(0, (), (frozenset(),))
    strata.append(Stratum("F", 2, "open square", True, tuple((e, IN) for e in SQUARE_EDGES)))
    for p, rays in _SQUARE_RAYS.items():
        edges = list(rays)
        for k, e in enumerate(edges):
            arrows.append(Arrow(p, e, frozenset({k}), IntMatrix.from_rows(_SQUARE_Q[e])))
        arrows.append(Arrow(p, "F", frozenset({0, 1}), IntMatrix.zeros(0, 2)))
    for e in SQUARE_EDGES:
        arrows.append(Arrow(e, "F", frozenset({0}), IntMatrix.zeros(0, 1)))
    geometry = {p: [v] for p, v in SQUARE_VERTICES.items()}
    for e, (p, q) in SQUARE_EDGES.items():
        geometry[e] = [SQUARE_VERTICES[p], SQUARE_VERTICES[q]]
    geometry["F"] = [SQUARE_VERTICES[p] for p in ("P2", "P3", "P4", "P1")]
    geometry = {k: [tuple(Fraction(a) for a in pt) for pt in v] for k, v in geometry.items()}
    ambient = (2, {p: IntMatrix.identity(2) for p in SQUARE_VERTICES})
    return FanifoldData(tuple(strata), fans, tuple(arrows), geometry, ambient)


def square_polytopes() -> dict[str, LatticePolytope]:
    """Q_P whose normal fan is Sigma_P plus the extra ray at P (triangles)."""
    return {
        "P1": LatticePolytope.from_points(2, [(0, 0), (0, 1), (1, 1)]),
        "P2": LatticePolytope.from_points(2, [(0, 0), (1, 0), (0, 1)]),
        "P3": LatticePolytope.from_points(2, [(0, 0), (1, 0), (1, 1)]),
        "P4": LatticePolytope.from_points(2, [(1, 0), (0, 1), (1, 1)]),
    }


def point_fanifold(F: Fan, sid: str = "P") -> FanifoldData:
    """A single 0-stratum carrying the fan F (no gluing)."""
    return FanifoldData((Stratum(sid, 0, "point", True, ()),), {sid: F}, (),
                        ambient=(F.rank, {sid: IntMatrix.identity(F.rank)}))
