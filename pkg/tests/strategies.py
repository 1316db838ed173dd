"""Random inputs and brute-force oracles shared by the property tests."""

from __future__ import annotations

import itertools
import math
import random

from hypothesis import strategies as st

from fanikit.fan import Fan, LatticePolytope, normal_fan
from fanikit.lattice import IntMatrix, det, primitive
from fanikit.polyhedra import in_cone

MAX_CONES = 20


def random_fan(rng: random.Random, rank: int | None = None) -> Fan:
    """A subfan of the normal fan of a random lattice polytope, with at most
    MAX_CONES cones (rank <= 3)."""
    n = rank or rng.randint(1, 3)
    while True:
        pts = [tuple(rng.randint(-2, 2) for _ in range(n)) for _ in range(n + 1 + rng.randint(0, 3))]
        Q = LatticePolytope.from_points(n, pts)
        if Q.full_dimensional:
            break
    F = normal_fan(Q)
    maximal = [c for i, c in enumerate(F.cones) if F.dims[i] == n]
    rng.shuffle(maximal)
    keep = rng.randint(1, len(maximal))
    chosen, best = [], None
    for m in maximal[:keep]:
        G = Fan.from_maximal(n, F.rays, chosen + [m])
        if len(G.cones) > MAX_CONES:
            break
        chosen.append(m)
        best = G
    if best is None:
        # a single maximal cone can already be too large; fall back to a face of it
        m = sorted(maximal[0])[:n]
        best = Fan.from_maximal(n, F.rays, [m])
    return _compact(best)


def _compact(F: Fan) -> Fan:
    """Drop rays that are not one-dimensional cones of F and renumber."""
    used = sorted({i for c in F.cones if len(c) == 1 for i in c})
    new = {old: k for k, old in enumerate(used)}
    return Fan(F.rank, tuple(F.rays[i] for i in used),
               tuple(frozenset(new[i] for i in c) for c in F.cones))


@st.composite
def fans(draw, rank=None):
    seed = draw(st.integers(0, 2**32 - 1))
    return random_fan(random.Random(seed), rank)


@st.composite
def int_matrices(draw, max_rows=4, max_cols=4, lo=-6, hi=6):
    m = draw(st.integers(0, max_rows))
    n = draw(st.integers(0, max_cols))
    rows = [[draw(st.integers(lo, hi)) for _ in range(n)] for _ in range(m)]
    return IntMatrix.from_rows(rows, n) if m else IntMatrix.zeros(0, n)


def minors_gcd(P: IntMatrix) -> int:
    """gcd of the maximal minors; 1 exactly when P: Z^n -> Z^k is onto."""
    k, n = P.shape
    if k == 0:
        return 1
    g = 0
    for cols in itertools.combinations(range(n), k):
        g = math.gcd(g, int(det([[P[i, j] for j in cols] for i in range(k)])))
    return g


def brute_quotient(F: Fan, s: int, P: IntMatrix) -> set[frozenset]:
    """Project the cones containing cone s with P, primitivize and dedup."""
    sigma = F.cones[s]
    out = set()
    for c in F.cones:
        if not sigma <= c:
            continue
        images = {primitive(P @ F.rays[i]) for i in c - sigma}
        # keep only extreme generators (non-simplicial cones have redundant images)
        extreme = {v for v in images if not in_cone(v, [w for w in images if w != v])}
        out.add(frozenset(extreme))
    return out


def cone_sets(F: Fan) -> set[frozenset]:
    return {frozenset(F.rays[i] for i in c) for c in F.cones}
