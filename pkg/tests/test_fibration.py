import random
from fractions import Fraction

import numpy as np
import pytest

from fanikit import catalog
from fanikit.dual import dual_space
from fanikit.fan import Fan
from fanikit.fibration import (RetractionContext, fiber_over, nearest_point, poisson_check, retract,
                               retract_oracle_check)
from fanikit.fanifold import FanifoldError


def rational_points(rng, n, k, bound=10, den=7):
    return [tuple(Fraction(rng.randint(-bound * den, bound * den), rng.randint(1, den)) for _ in range(n))
            for _ in range(k)]


def test_quadrant_examples():
    ctx = RetractionContext(catalog.affine_space(2))
    assert retract(ctx, (-1, 2)) == (0, 2)
    assert retract(ctx, (-3, -4)) == (0, 0)
    assert retract(ctx, ("1/2", 3)) == (Fraction(1, 2), 3)


def test_complete_fan_is_identity():
    ctx = RetractionContext(catalog.projective_space(2))
    assert retract(ctx, (-7, 3)) == (-7, 3)


@pytest.mark.parametrize("F", [catalog.affine_space(2), catalog.half_plane(), catalog.affine_space(3),
                               Fan.from_maximal(2, [(1, 0), (1, 2)], [[0, 1]]),
                               Fan.from_maximal(2, [(1, 0), (0, 1), (-1, 0)], [[0, 1], [2]])])
def test_idempotent_and_identity_on_support(F):
    rng = random.Random(11)
    ctx = RetractionContext(F)
    for m in rational_points(rng, F.rank, 150):
        r = retract(ctx, m)
        assert F.contains_point(r)
        assert retract(ctx, r) == r
        if F.contains_point(m):
            assert r == tuple(m)


@pytest.mark.parametrize("F", [catalog.affine_space(2), catalog.half_plane(), catalog.affine_space(3),
                               Fan.from_maximal(2, [(1, 0), (1, 2)], [[0, 1]])])
def test_nearest_point_agreement_on_convex_support(F):
    rng = random.Random(5)
    rep = retract_oracle_check(RetractionContext(F), rational_points(rng, F.rank, 100))
    assert rep.ok, rep.mismatches[:3]


def test_nearest_point_with_other_inner_product():
    gram = ((2, 1), (1, 3))
    ctx = RetractionContext(catalog.affine_space(2), gram)
    rng = random.Random(2)
    rep = retract_oracle_check(ctx, rational_points(rng, 2, 100))
    assert rep.ok
    assert nearest_point(ctx, (-1, -1)) == (0, 0)


def test_bad_inner_products():
    with pytest.raises(ValueError):
        RetractionContext(catalog.affine_space(2), ((1, 2), (0, 1)))
    with pytest.raises(ValueError):
        RetractionContext(catalog.affine_space(2), ((1, 2), (2, 1)))


def test_half_plane_boundary_is_fixed():
    ctx = RetractionContext(catalog.half_plane())
    for x in (-3, 0, "5/2"):
        assert retract(ctx, (x, 0)) == (Fraction(x), 0)


def test_fibers_on_the_square():
    phi = catalog.square_fanifold()
    psi = dual_space(phi, catalog.square_polytopes())
    f = fiber_over(phi, "P1", "pi_underline", psi)
    assert f.torus_rank == 2 and f.base == "point" and f.dual_cell == "P1^perp"
    f = fiber_over(phi, "F", "pi_underline", psi)
    assert f.torus_rank == 0 and f.base == "T*F"
    f = fiber_over(phi, "I12", "pi")
    assert f.torus_rank == 1 and f.base == "I12"
    with pytest.raises(FanifoldError):
        fiber_over(phi, "P1", "pi_underline")
    with pytest.raises(ValueError):
        fiber_over(phi, "P1", "sideways")


def test_poisson_brackets():
    rng = np.random.default_rng(0)
    X = rng.uniform(-1, 1, size=(100, 4))
    assert poisson_check(2, ["p1", "p2"], X).max_bracket <= 1e-8
    assert poisson_check(2, ["p1", "q2"], X).max_bracket <= 1e-8
    neg = poisson_check(2, ["q1", "p1"], X)
    assert abs(neg.max_bracket - 1) < 1e-6
    f = lambda x: x[2] ** 2 + x[3]
    assert poisson_check(2, [f, "p2"], X).max_bracket <= 1e-8
