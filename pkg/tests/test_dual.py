import random
from fractions import Fraction

import pytest

from fanikit import catalog
from fanikit.dual import (MomentContext, OrbitPoint, algebraic_moment, condition_vi_check,
                          dual_filtration, dual_space, lattice_points, mom_Q, very_ample_check)
from fanikit.fan import LatticePolytope
from fanikit.fanifold import sphere_fanifold
from fanikit.lattice import IntMatrix

HALF = Fraction(1, 2)


def test_lattice_points():
    assert lattice_points(catalog.unit_interval()) == [(0,), (1,)]
    assert len(lattice_points(catalog.unit_square())) == 4
    assert len(lattice_points(catalog.standard_simplex(2, 2))) == 6


def test_algebraic_moment_values():
    I = MomentContext(catalog.unit_interval())
    assert algebraic_moment(I, (1,)) == (HALF,)
    S = MomentContext(catalog.unit_square())
    assert algebraic_moment(S, (1, 1)) == (HALF, HALF)
    assert abs(float(algebraic_moment(I, (1e-6,))[0])) < 1e-5


def test_algebraic_moment_is_monotone_on_interval():
    I = MomentContext(catalog.unit_interval())
    rng = random.Random(0)
    xs = sorted({Fraction(rng.randint(1, 10**6), rng.randint(1, 10**3)) for _ in range(100)})
    vals = [algebraic_moment(I, (x,))[0] for x in xs]
    assert all(a < b for a, b in zip(vals, vals[1:]))


def test_mom_on_orbits_and_phases():
    import cmath

    I = MomentContext(catalog.unit_interval())
    for th in (0.0, 0.7, 2.0, 3.1):
        assert abs(mom_Q(I, (cmath.exp(1j * th),))[0] - 0.5) < 1e-12
    assert mom_Q(I, (Fraction(3),)) == algebraic_moment(I, (3,))
    assert mom_Q(I, OrbitPoint(((1,),), ())) == (0,)
    assert mom_Q(I, OrbitPoint(((-1,),), ())) == (1,)
    S = MomentContext(catalog.unit_square())
    assert mom_Q(S, OrbitPoint(((1, 0),), (1,))) == (0, HALF)
    with pytest.raises(ValueError):
        mom_Q(S, OrbitPoint(((1, 1),), (1,)))


def test_very_ample():
    assert very_ample_check(catalog.unit_square()) is True
    assert very_ample_check(catalog.unit_interval()) is True
    assert very_ample_check(catalog.standard_simplex(3), 2) == "assumed(l=2)"


def test_condition_vi_on_square_passes():
    rep = condition_vi_check(catalog.square_fanifold(), catalog.square_polytopes())
    assert rep.ok, rep.failures


def test_condition_vi_fails_without_vertices():
    phi = sphere_fanifold(catalog.affine_minus_rays(3), check=False)
    rep = condition_vi_check(phi, {})
    assert not rep.ok
    assert "no_vertices" in rep.kinds()


def test_condition_vi_catches_bad_polytopes():
    phi = catalog.square_fanifold()
    polys = dict(catalog.square_polytopes())
    polys["P1"] = catalog.standard_simplex(2)
    rep = condition_vi_check(phi, polys)
    assert "not_subfan" in rep.kinds()
    del polys["P2"]
    assert "missing_polytope" in condition_vi_check(phi, polys).kinds()


def test_condition_vi_rejects_non_unimodular_identification():
    phi = catalog.square_fanifold()
    ids = {("I12", "P1", "P2"): IntMatrix.from_rows([[2]])}
    rep = condition_vi_check(phi, catalog.square_polytopes(), identifications=ids)
    assert "not_isomorphism" in rep.kinds()
    ids = {("I12", "P1", "P2"): IntMatrix.from_rows([[-1]])}
    assert not condition_vi_check(phi, catalog.square_polytopes(), identifications=ids).ok


def test_point_fanifold_condition_vi():
    phi = catalog.point_fanifold(catalog.projective_space(2))
    assert condition_vi_check(phi, {"P": catalog.standard_simplex(2)}).ok


def test_square_dual_space():
    psi = dual_space(catalog.square_fanifold(), catalog.square_polytopes())
    assert len(psi.cells) == 9
    assert [c.dim for c in psi.cells].count(0) == 1
    F = psi.cell_of("F")
    assert F.dim == 0 and F.vertices == ((HALF, HALF),)
    rays = {sid: psi.cell_of(sid).rays for sid in ("I12", "I23", "I34", "I14")}
    assert rays == {"I12": ((-1, 0),), "I23": ((0, -1),), "I34": ((1, 0),), "I14": ((0, 1),)}
    for sid in ("P1", "P2", "P3", "P4"):
        c = psi.cell_of(sid)
        assert c.dim == 2 and c.vertices == ((HALF, HALF),) and len(c.rays) == 2
    assert set(psi.cell_of("P2").rays) == {(-1, 0), (0, -1)}
    # inclusions reverse
    phi = catalog.square_fanifold()
    for a in phi.arrows:
        assert (psi.cell_of(a.dst).label, psi.cell_of(a.src).label) in psi.incidence


def test_square_dual_filtration():
    f = dual_filtration(dual_space(catalog.square_fanifold(), catalog.square_polytopes()))
    assert [len(s) for s in f] == [4, 8, 9]
    assert set(f[0]) == {"P1^perp", "P2^perp", "P3^perp", "P4^perp"}


def test_point_fanifold_dual_is_the_polytope():
    phi = catalog.point_fanifold(catalog.projective_space(2))
    psi = dual_space(phi, {"P": catalog.standard_simplex(2)})
    assert [c.dim for c in psi.cells].count(0) == 3
    assert [c.dim for c in psi.cells].count(1) == 3
    assert [c.dim for c in psi.cells].count(2) == 1
    verts = {c.vertices[0] for c in psi.cells if c.dim == 0}
    # charts are placed by x = offset - A u, so Q appears reflected through the anchor
    assert verts == {(0, 0), (-1, 0), (0, -1)}
    assert len(dual_filtration(psi)) == 1


def test_sphere_p2_dual_is_a_circle():
    phi = sphere_fanifold(catalog.projective_space(2))
    polys = {s.id: catalog.unit_interval() for s in phi.strata if s.dim == 0}
    assert condition_vi_check(phi, polys).ok
    psi = dual_space(phi, polys)
    dims = sorted(c.dim for c in psi.cells)
    assert dims == [0, 0, 0, 1, 1, 1]
    f = dual_filtration(psi)
    assert len(f[0]) == 3 and len(f[-1]) == 6


def test_dual_space_refuses_failing_data():
    phi = sphere_fanifold(catalog.affine_minus_rays(3), check=False)
    with pytest.raises(Exception):
        dual_space(phi, {})
