from fractions import Fraction

from fanikit.polyhedra import (cone_faces, cone_hrep, feasible_point, hcone_extreme_rays, in_cone,
                               is_pointed, linprog, polytope_hrep, polytope_vertices, simplex_volume)


def test_linprog_optimum_is_exact():
    res = linprog([1, 1], [[1, 2], [3, 1]], [4, 6])
    assert res.status == "optimal"
    assert res.value == Fraction(14, 5)
    assert res.x == (Fraction(8, 5), Fraction(6, 5))


def test_linprog_infeasible_and_unbounded():
    assert linprog([1], [[1], [-1]], [0, -1]).status == "infeasible"
    assert linprog([1], [[-1]], [0]).status == "unbounded"
    assert feasible_point([[1, 0]], [1], [[0, 1]], [2]) is not None


def test_cone_hrep_quadrant():
    h = cone_hrep([(1, 0), (0, 1)], 2)
    assert not h.equations
    assert sorted(h.facets) == [(0, 1), (1, 0)]
    assert h.contains((1, 3)) and not h.contains((-1, 3))
    assert h.in_relint((1, 1)) and not h.in_relint((0, 1))


def test_cone_faces_of_square_cone():
    gens = [(1, 0, 1), (0, 1, 1), (-1, 0, 1), (0, -1, 1)]
    faces = cone_faces(gens, 3)
    assert len([f for f in faces if len(f) == 2]) == 4
    assert frozenset() in faces and frozenset(range(4)) in faces
    assert len(faces) == 1 + 4 + 4 + 1


def test_pointedness_and_membership():
    assert is_pointed([(1, 0), (1, 1)], 2)
    assert not is_pointed([(1, 0), (-1, 0)], 2)
    assert in_cone((Fraction(1, 2), 2), [(1, 0), (0, 1)])
    assert not in_cone((-1, 0), [(1, 0), (1, 1)])


def test_hcone_extreme_rays():
    rays = hcone_extreme_rays([], [(1, 0), (0, 1)], 2)
    assert sorted(rays) == [(-1, 0), (0, -1)]


def test_polytope_helpers():
    pts = [(0, 0), (1, 0), (0, 1), (1, 1), (Fraction(1, 2), Fraction(1, 2))]
    assert polytope_vertices(pts, 2) == [0, 1, 2, 3]
    h = polytope_hrep(pts, 2)
    assert len(h.normals) == 4
    assert simplex_volume([(0, 0), (2, 0), (0, 3)]) == 6
