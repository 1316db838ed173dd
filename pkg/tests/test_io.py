import json
import random

import numpy as np
import pytest

from fanikit import catalog
from fanikit import io as fio
from fanikit.amoeba import LaurentFamily, sample_curve
from fanikit.dual import dual_space
from fanikit.fanifold import sphere_fanifold
from fanikit.tropical import Triangulation, dual_complex
from strategies import random_fan

P2_T = Triangulation(((0, 0), (1, 0), (0, 1), (-1, -1)), ((0, 1, 2), (0, 2, 3), (0, 1, 3)))


def roundtrip(obj):
    return json.loads(fio.dumps(obj))


def test_fan_roundtrip():
    rng = random.Random(4)
    for F in [catalog.projective_space(2), catalog.affine_space(3)] + [random_fan(rng) for _ in range(10)]:
        assert fio.fan_from_json(roundtrip(fio.fan_to_json(F))) == F


def test_polytope_and_stacky_roundtrip():
    for Q in (catalog.unit_square(), catalog.standard_simplex(3, 2)):
        assert fio.polytope_from_json(roundtrip(fio.polytope_to_json(Q))) == Q
    for SF in (catalog.stacky_a1(2), catalog.stacky_diag()):
        assert fio.stacky_from_json(roundtrip(fio.stacky_to_json(SF))) == SF


def test_fanifold_roundtrip():
    for phi in (catalog.square_fanifold(), sphere_fanifold(catalog.projective_space(2)),
                catalog.point_fanifold(catalog.p1())):
        assert fio.fanifold_from_json(roundtrip(fio.fanifold_to_json(phi))) == phi


def test_polytopes_roundtrip():
    polys = catalog.square_polytopes()
    back = fio.polytopes_from_json(roundtrip(fio.polytopes_to_json(polys, {"P1": 2})))
    assert back[0] == polys and back[1] == {"P1": 2}


def test_tropical_roundtrips():
    T, mu = fio.triangulation_from_json(roundtrip(fio.triangulation_to_json(P2_T, [0, "1/2", 1, 1])))
    assert T == P2_T and mu[1] == fio.as_fraction("1/2")
    PC = dual_complex(P2_T, [0, 1, 1, 1])
    assert fio.tropical_complex_from_json(roundtrip(fio.tropical_complex_to_json(PC))) == PC


def test_dual_complex_roundtrip():
    psi = dual_space(catalog.square_fanifold(), catalog.square_polytopes())
    assert fio.dual_complex_from_json(roundtrip(fio.dual_complex_to_json(psi))) == psi


def test_family_roundtrip_keeps_floats_exact():
    fam = LaurentFamily(((complex(0.1, -1 / 3), (1, 0), "2/3"), (1, (0, 1), 0)), 1234.5678901234567)
    back = fio.family_from_json(roundtrip(fio.family_to_json(fam)))
    assert back == fam


def test_rationals_are_strings():
    d = fio.polytope_to_json(catalog.unit_square().scaled(1).translated(("1/2", 0)))
    assert "1/2" in json.dumps(d)


def test_cloud_csv_roundtrip(tmp_path):
    fam = LaurentFamily.from_pl([(0, 0), (1, 0), (0, 1)], [0, 0, 0], 100.0)
    cloud = sample_curve(fam, radii=6, phases=6)
    path = tmp_path / "c.csv"
    fio.write_cloud_csv(cloud, path)
    assert path.read_text().splitlines()[0] == "z1re,z1im,z2re,z2im,log1,log2"
    back = fio.read_cloud_csv(path, cloud.log_t)
    assert np.array_equal(back.z, cloud.z) and np.array_equal(back.logs, cloud.logs)


def test_malformed_json_reports_position(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"rank": 2,\n  "rays": [[1, 0],, ]}')
    with pytest.raises(fio.InputError, match=r"line 2, column"):
        fio.load(p)


def test_schema_errors(tmp_path):
    p = tmp_path / "x.json"
    p.write_text('{"schema": "fanikit/99", "kind": "fan"}')
    with pytest.raises(fio.SchemaError):
        fio.load(p)
    p.write_text('{"kind": "fan", "rank": 1}')
    with pytest.raises(fio.SchemaError):
        fio.load(p)
    p.write_text('{"kind": "bogus"}')
    with pytest.raises(fio.SchemaError):
        fio.load(p)


def test_guess_kind():
    assert fio.guess_kind({"strata": []}) == "fanifold"
    assert fio.guess_kind({"simplices": []}) == "triangulation"
    assert fio.guess_kind({"cones": []}) == "fan"


def test_vectors_render_on_one_line():
    text = fio.dumps(fio.fan_to_json(catalog.affine_space(2)))
    assert '"rays": [[1, 0], [0, 1]]' in text
