import random

import pytest

from fanikit import catalog
from fanikit.fltz import annihilator, chart_data, component_order, fltz_skeleton, local_factorization
from strategies import random_fan

TEST_FANS = [catalog.affine_space(1), catalog.affine_space(2), catalog.affine_space(3), catalog.p1(),
             catalog.projective_space(2), catalog.projective_space(3), catalog.half_plane()]


def test_affine_line_strata():
    st = fltz_skeleton(catalog.affine_space(1))
    assert [(s.annihilator.rank, s.cone.dim) for s in st] == [(1, 0), (0, 1)]


def test_affine_plane_strata():
    st = fltz_skeleton(catalog.affine_space(2))
    assert sorted((s.annihilator.rank, s.cone.dim) for s in st) == [(0, 2), (1, 1), (1, 1), (2, 0)]


def test_annihilator_is_saturated():
    from fanikit.fan import Cone

    ann = annihilator(Cone(2, ((1, 2),)))
    assert ann.generators() in ([(2, -1)], [(-2, 1)])
    assert ann.saturated


@pytest.mark.parametrize("F", TEST_FANS + [random_fan(random.Random(k)) for k in range(8)])
def test_rank_plus_dim_and_factorization(F):
    for s in fltz_skeleton(F):
        assert s.annihilator.rank + s.cone.dim == F.rank
    for i in range(len(F.cones)):
        rep = local_factorization(F, i)
        assert rep.ok, rep.mismatches
        assert sorted(rep.checked) == sorted(F.containing(i))


def test_factorization_example():
    A2 = catalog.affine_space(2)
    rep = local_factorization(A2, A2.find([0]))
    assert rep.ok and len(rep.checked) == 2


def test_stacky_component_orders():
    SF = catalog.stacky_a1(2)
    st = fltz_skeleton(SF)
    assert [s.component_order for s in st] == [1, 2]
    assert component_order(SF, 1) == 2
    assert [s.component_order for s in fltz_skeleton(catalog.stacky_a1(3))] == [1, 3]


def test_square_chart_data():
    phi = catalog.square_fanifold()
    ch = chart_data(phi, "P1")
    assert ch.codim == 2 and len(ch.strata) == 4
    assert chart_data(phi, "I12").codim == 1 and len(chart_data(phi, "I12").strata) == 2
    f = chart_data(phi, "F")
    assert f.codim == 0 and len(f.strata) == 1
