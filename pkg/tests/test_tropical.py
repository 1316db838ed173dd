from fractions import Fraction

import pytest

from fanikit import catalog
from fanikit.tropical import (TropicalError, TropicalPolynomial, Triangulation, adapted_check,
                              argmax_indices, complement_components, dual_complex, grid_oracle,
                              psi_embedding_check, star_shaped_check, trop_eval, validate_triangulation)

LINE = Triangulation(((0, 0), (1, 0), (0, 1)), ((0, 1, 2),))
SEGMENT = Triangulation(((-1,), (0,), (1,)), ((0, 1), (1, 2)))
P2_STAR = Triangulation(((0, 0), (1, 0), (0, 1), (-1, -1)), ((0, 1, 2), (0, 2, 3), (0, 1, 3)))
P2_MU = [0, 1, 1, 1]


def test_trop_eval():
    phi = TropicalPolynomial.from_pl(LINE, [0, 0, 0])
    assert trop_eval(phi, (2, 1)) == (2, frozenset({(1, 0)}))
    assert trop_eval(phi, (0, 0)) == (0, frozenset({(0, 0), (1, 0), (0, 1)}))
    assert trop_eval(phi, (-5, -7)) == (0, frozenset({(0, 0)}))
    assert argmax_indices(LINE, [0, 0, 0], ("1/2", "1/2")) == frozenset({1, 2})


def test_triangulation_checks():
    assert validate_triangulation(P2_STAR).ok
    overlapping = Triangulation(((0, 0), (1, 0), (0, 1), (1, 1)), ((0, 1, 2), (0, 1, 3)))
    assert not validate_triangulation(overlapping).ok
    flat = Triangulation(((0, 0), (1, 1), (2, 2)), ((0, 1, 2),))
    assert not validate_triangulation(flat).ok


def test_star_shaped():
    assert star_shaped_check(LINE)
    assert star_shaped_check(SEGMENT)
    assert star_shaped_check(P2_STAR)
    T = Triangulation(((0, 0), (1, 0), (0, 1), (1, 1)), ((0, 1, 2), (1, 2, 3)))
    assert not star_shaped_check(T)


def test_adapted():
    assert adapted_check(LINE, [5, -2, 7]).ok
    assert adapted_check(SEGMENT, [1, 0, 1]).ok
    flat = adapted_check(SEGMENT, [0, 0, 0])
    assert not flat.ok and flat.failures
    assert not adapted_check(SEGMENT, [-1, 0, -1]).ok
    assert adapted_check(P2_STAR, P2_MU).ok


def test_tropical_line_complex():
    PC = dual_complex(LINE, [0, 0, 0])
    assert len(PC.of_dim(0)) == 1 and PC.of_dim(0)[0].vertices == ((0, 0),)
    rays = sorted(c.rays[0] for c in PC.of_dim(1))
    assert rays == [(-1, 0), (0, -1), (1, 1)]
    assert all((PC.of_dim(0)[0].label, c.label) in PC.incidence for c in PC.of_dim(1))


def test_segment_complex_is_two_points():
    PC = dual_complex(SEGMENT, [1, 0, 1])
    pts = sorted(c.vertices[0] for c in PC.cells)
    assert pts == [(-1,), (1,)] and all(c.dim == 0 for c in PC.cells)


def test_single_simplex_without_walls():
    PC = dual_complex(Triangulation(((0,), (1,)), ((0, 1),)), [0, 0])
    assert [c.vertices for c in PC.cells] == [((0,),)]


def test_non_adapted_input_is_refused():
    with pytest.raises(TropicalError):
        dual_complex(SEGMENT, [0, 0, 0])


def test_complement_components():
    regs = complement_components(LINE, [0, 0, 0])
    assert len(regs) == 3
    for r in regs:
        assert argmax_indices(LINE, [0, 0, 0], r.witness) == frozenset({r.vertex})
    assert len(complement_components(SEGMENT, [1, 0, 1])) == 3
    assert len(complement_components(P2_STAR, P2_MU)) == 4
    one = Triangulation(((0, 0),), ())
    assert len(complement_components(one, [0])) == 1


@pytest.mark.parametrize("T, mu", [(LINE, [0, 0, 0]), (P2_STAR, P2_MU)])
def test_grid_oracle(T, mu):
    v = grid_oracle(T, mu, dual_complex(T, mu))
    assert v.ok, v.failures[:3]


def test_grid_oracle_detects_a_wrong_complex():
    PC = dual_complex(LINE, [0, 0, 0])
    PC.cells = PC.cells[:-1]
    assert not grid_oracle(LINE, [0, 0, 0], PC, lo=-1, hi=1, pitch=Fraction(1, 2)).ok


def test_psi_embedding_p1_and_p2():
    rep = psi_embedding_check(catalog.p1(), SEGMENT, [1, 0, 1])
    assert rep.ok, rep.failures
    assert len(rep.mapping) == 2
    rep = psi_embedding_check(catalog.projective_space(2), P2_STAR, P2_MU)
    assert rep.ok, rep.failures
    assert len(rep.mapping) == 6


def test_psi_embedding_rejects_permuted_labels():
    rep = psi_embedding_check(catalog.projective_space(2), P2_STAR, P2_MU)
    lab = dict(rep.mapping)
    lab["s0"], lab["s1"] = lab["s1"], lab["s0"]
    bad = psi_embedding_check(catalog.projective_space(2), P2_STAR, P2_MU, labeling=lab)
    assert not bad.ok


def test_psi_embedding_requires_matching_rays():
    rep = psi_embedding_check(catalog.affine_space(2), P2_STAR, P2_MU)
    assert not rep.ok
