"""Acceptance suite: one test and one summary line per criterion.

Run under pytest (the lines are echoed in the terminal summary) or directly
with ``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import random
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from fanikit import catalog  # noqa: E402
from fanikit.amoeba import RESIDUAL_TOL, LaurentFamily, convergence_report  # noqa: E402
from fanikit.dual import (MomentContext, algebraic_moment, condition_vi_check,  # noqa: E402
                          dual_space)
from fanikit.fan import Fan, quotient_fan, support_is_convex, validate_fan  # noqa: E402
from fanikit.fanifold import (filtration, handle_schedule, is_closed, sphere_fanifold,  # noqa: E402
                              validate_fanifold)
from fanikit.fibration import RetractionContext, poisson_check, retract, retract_oracle_check  # noqa: E402
from fanikit.fltz import fltz_skeleton, local_factorization  # noqa: E402
from fanikit.tropical import (Triangulation, complement_components, dual_complex,  # noqa: E402
                              grid_oracle, psi_embedding_check)
from strategies import brute_quotient, cone_sets, random_fan  # noqa: E402

RESULTS: list[str] = []
HALF = Fraction(1, 2)

LINE = Triangulation(((0, 0), (1, 0), (0, 1)), ((0, 1, 2),))
SEGMENT = Triangulation(((-1,), (0,), (1,)), ((0, 1), (1, 2)))
P2_STAR = Triangulation(((0, 0), (1, 0), (0, 1), (-1, -1)), ((0, 1, 2), (0, 2, 3), (0, 1, 3)))


def record(n: int, ok: bool, detail: str) -> None:
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS.append(line)
    print(line)


def check(n: int, fn) -> None:
    """Run fn, which returns a detail string or raises AssertionError."""
    try:
        detail = fn()
    except AssertionError as e:
        record(n, False, str(e) or "assertion failed")
        raise
    record(n, True, detail)


def rational_points(rng: random.Random, n: int, k: int, bound: int = 10, den: int = 7):
    return [tuple(Fraction(rng.randint(-bound * den, bound * den), rng.randint(1, den)) for _ in range(n))
            for _ in range(k)]


# --------------------------------------------------------------------------


def _square_end_to_end() -> str:
    t0 = time.perf_counter()
    phi = catalog.square_fanifold()
    assert validate_fanifold(phi).valid, "square fanifold does not validate"
    st = filtration(phi)
    assert [len(s.pieces) for s in st] == [4, 4, 1], "filtration stage sizes"
    assert all(F.rank == 2 and len(F.cones) == 4 for _, F in st[0].pieces), "stage 0 is not 4 copies of A^2"
    assert all(F.rank == 1 and len(F.cones) == 2 for _, F in st[1].pieces), "stage 1 is not 4 copies of A^1"
    assert [p for p, _ in st[2].pieces] == ["F"], "stage 2 adds F"
    assert set(dict(st[2].interfaces)["F"]) == {"I12", "I23", "I34", "I14"}, "F glued along its in-boundary"
    assert is_closed(phi), "square should be closed"
    ranks = [h.torus_rank for h in handle_schedule(phi)]
    assert ranks == [2, 2, 2, 2, 1, 1, 1, 1, 0], f"torus ranks {ranks}"
    dt = time.perf_counter() - t0
    assert dt < 1.0, f"took {dt:.2f} s"
    return f"valid, closed, stages 4/4/1, torus ranks {ranks}, {dt * 1000:.0f} ms"


def test_criterion_1_square_end_to_end():
    check(1, _square_end_to_end)


def _quotient_oracle() -> str:
    rng = random.Random(2024)
    n_fans = n_cones = 0
    for _ in range(200):
        F = random_fan(rng)
        assert F.rank <= 3 and len(F.cones) <= 20 and validate_fan(F).valid, "bad random fan"
        for s in range(len(F.cones)):
            Q = quotient_fan(F, s)
            assert cone_sets(Q.fan) == brute_quotient(F, s, Q.projection), f"mismatch on {F} cone {s}"
            n_cones += 1
        n_fans += 1
    return f"{n_fans} fans, {n_cones} cones agree with the brute-force oracle"


def test_criterion_2_quotient_oracle():
    check(2, _quotient_oracle)


FLTZ_FANS = [catalog.affine_space(1), catalog.affine_space(2), catalog.affine_space(3), catalog.p1(),
             catalog.projective_space(2), catalog.projective_space(3), catalog.half_plane()]


def _fltz() -> str:
    fans = FLTZ_FANS + [random_fan(random.Random(k)) for k in range(30)]
    strata = pairs = 0
    for F in fans:
        for s in fltz_skeleton(F):
            assert s.annihilator.rank + s.cone.dim == F.rank, f"rank + dim != n on {F}"
            strata += 1
        for i in range(len(F.cones)):
            rep = local_factorization(F, i)
            assert rep.ok, f"factorization mismatch {rep.mismatches[:2]}"
            pairs += len(rep.checked)
    orders = [s.component_order for s in fltz_skeleton(catalog.stacky_a1(2))]
    assert orders == [1, 2], f"stacky A^1 orders {orders}"
    return f"{strata} strata over {len(fans)} fans, {pairs} face pairs factor, stacky orders {orders}"


def test_criterion_3_fltz():
    check(3, _fltz)


RETRACT_FANS = [catalog.affine_space(2), catalog.half_plane(), catalog.affine_space(3),
                Fan.from_maximal(2, [(1, 0), (1, 2)], [[0, 1]]),
                Fan.from_maximal(2, [(1, 0), (0, 1), (-1, 0)], [[0, 1], [2]]),
                catalog.projective_space(2)] + [random_fan(random.Random(100 + k)) for k in range(4)]


def _retraction() -> str:
    rng = random.Random(7)
    oracle_fans = 0
    for F in RETRACT_FANS:
        ctx = RetractionContext(F)
        pts = rational_points(rng, F.rank, 1000)
        for m in pts:
            r = retract(ctx, m)
            assert F.contains_point(r), f"{m} -> {r} leaves the support"
            assert retract(ctx, r) == r, f"not idempotent at {m}"
            if F.contains_point(m):
                assert r == tuple(m), f"moves support point {m}"
        if support_is_convex(F):
            rep = retract_oracle_check(ctx, pts)
            assert rep.ok, f"nearest-point mismatch {rep.mismatches[:2]}"
            oracle_fans += 1
    quad = RetractionContext(catalog.affine_space(2))
    for x, y in rational_points(rng, 2, 1000):
        r = retract(quad, (x, y))
        if x < 0 and y > 0:
            assert r == (0, y), f"({x},{y}) -> {r}"
        elif x > 0 and y < 0:
            assert r == (x, 0), f"({x},{y}) -> {r}"
        elif x < 0 and y < 0:
            assert r == (0, 0), f"({x},{y}) -> {r}"
    for F in (catalog.p1(), catalog.projective_space(2), catalog.projective_space(3)):
        ctx = RetractionContext(F)
        for m in rational_points(rng, F.rank, 200):
            assert retract(ctx, m) == tuple(m), "complete fan moved a point"
    return (f"{len(RETRACT_FANS)} fans x 1000 points idempotent, oracle exact on {oracle_fans} convex fans, "
            "quadrant regions and complete fans ok")


def test_criterion_4_retraction():
    check(4, _retraction)


def _moment_dual() -> str:
    I = MomentContext(catalog.unit_interval())
    rng = random.Random(0)
    xs = set()
    while len(xs) < 100:
        xs.add(Fraction(rng.randint(1, 10**6), rng.randint(1, 10**3)))
    xs = sorted(xs)
    vals = [algebraic_moment(I, (x,))[0] for x in xs]
    assert all(a < b for a, b in zip(vals, vals[1:])), "moment not strictly monotone"
    phi = catalog.square_fanifold()
    polys = catalog.square_polytopes()
    assert condition_vi_check(phi, polys).ok, "condition (vi) fails on the square"
    psi = dual_space(phi, polys)
    dims = sorted(c.dim for c in psi.cells)
    assert dims == [0] + [1] * 4 + [2] * 4, f"cell dims {dims}"
    assert psi.cell_of("F").vertices == ((HALF, HALF),), "F^perp is not (1/2, 1/2)"
    for a in phi.arrows:
        assert (psi.cell_of(a.dst).label, psi.cell_of(a.src).label) in psi.incidence, "incidence not reversed"
    bad = sphere_fanifold(catalog.affine_minus_rays(3), check=False)
    rep = condition_vi_check(bad, {})
    assert not rep.ok, "condition (vi) should fail on the A^3-minus-rays sphere"
    return f"100 moment samples monotone, square Psi 1+4+4 with F^perp=(1/2,1/2), negative control {sorted(rep.kinds())}"


def test_criterion_5_moment_and_dual():
    check(5, _moment_dual)


def _tropical() -> str:
    PC = dual_complex(LINE, [0, 0, 0])
    verts, edges = PC.of_dim(0), PC.of_dim(1)
    assert len(verts) == 1 and len(edges) == 3 and all(len(c.rays) == 1 for c in edges), "line shape"
    for T, mu in ((LINE, [0, 0, 0]), (P2_STAR, [0, 1, 1, 1])):
        v = grid_oracle(T, mu, dual_complex(T, mu))
        assert v.ok, f"grid oracle {v.failures[:2]}"
    for T, mu in ((LINE, [0, 0, 0]), (SEGMENT, [1, 0, 1]), (P2_STAR, [0, 1, 1, 1])):
        assert len(complement_components(T, mu)) == len(T.vertices), "component count"
    assert psi_embedding_check(catalog.p1(), SEGMENT, [1, 0, 1]).ok, "psi on P^1"
    rep = psi_embedding_check(catalog.projective_space(2), P2_STAR, [0, 1, 1, 1])
    assert rep.ok, "psi on P^2"
    lab = dict(rep.mapping)
    lab["s0"], lab["s1"] = lab["s1"], lab["s0"]
    neg = psi_embedding_check(catalog.projective_space(2), P2_STAR, [0, 1, 1, 1], labeling=lab)
    assert not neg.ok, "permuted labels accepted"
    return "line 1 vertex + 3 rays, grid oracle exact at 1/8, components = |Vert T|, psi ok, permuted control rejected"


def test_criterion_6_tropical():
    check(6, _tropical)


@pytest.fixture(scope="module")
def amoeba_run():
    fam = LaurentFamily.from_pl([(0, 0), (1, 0), (0, 1)], [0, 0, 0], 1e4)
    PC = dual_complex(LINE, [0, 0, 0])
    t0 = time.perf_counter()
    rep = convergence_report(fam, PC, [1e2, 1e3, 1e4], radii=64, phases=64)
    return rep, time.perf_counter() - t0


def test_criterion_7_amoeba(amoeba_run):
    rep, dt = amoeba_run
    sups = [r.sup for r in rep.rows]
    res = max(r.max_residual for r in rep.rows)
    table = ", ".join(f"t=1e{int(round(np.log10(r.t)))}: {r.sup:.4f}" for r in rep.rows)
    bound = sups[-1] < 0.05
    detail = f"sup {table}; max |W| {res:.1e}; {dt:.1f} s"
    if not bound:
        detail += f"; sup at 1e4 is {sups[-1]:.4f} >= 0.05 (the exact sup is at least log2/log t = 0.0753, attained at z = (-1/2, -1/2))"
    record(7, rep.sup_decreasing and res < RESIDUAL_TOL and dt < 60 and bound, detail)
    assert rep.sup_decreasing, f"not strictly decreasing: {sups}"
    assert res < RESIDUAL_TOL
    assert dt < 60


@pytest.mark.xfail(strict=True, reason="the real solution z1 = z2 = -1/2 lies log 2 / log t from the tropical "
                                       "line, so the sup at t = 1e4 is at least 0.0753")
def test_criterion_7_sup_bound(amoeba_run):
    rep, _ = amoeba_run
    assert rep.rows[-1].sup < 0.05


def _poisson() -> str:
    X = np.random.default_rng(0).uniform(-1, 1, size=(100, 4))
    worst = max(poisson_check(2, pair, X).max_bracket for pair in (["p1", "p2"], ["q1", "q2"], ["p2", "q1"]))
    assert worst < 1e-6, f"momentum bracket {worst:.2e}"
    neg = poisson_check(2, ["q1", "p1"], X).max_bracket
    assert abs(neg - 1) < 1e-6, f"negative control {neg}"
    return f"max bracket {worst:.1e} over 100 samples, control {{q1,p1}} = {neg:.9f}"


def test_criterion_8_poisson():
    check(8, _poisson)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
