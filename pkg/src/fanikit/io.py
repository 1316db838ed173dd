"""JSON (schema "fanikit/1") and CSV serialization.

Rationals are written as "p/q" strings (plain ints when integral); floats
only appear in amoeba outputs and are written with repr, which round-trips
and never needs more than 17 significant digits.
"""

from __future__ import annotations

import csv
import json
from fractions import Fraction
from pathlib import Path
from typing import Any

import numpy as np

from .amoeba import LaurentFamily, SampleCloud
from .dual import DualCell, DualComplex
from .fan import Fan, LatticePolytope, StackyFan
from .fanifold import Arrow, FanifoldData, Stratum
from .lattice import IntMatrix, as_fraction, fraction_str
from .tropical import TropicalCell, TropicalComplex, Triangulation

SCHEMA = "fanikit/1"


class SchemaError(ValueError):
    pass


class InputError(ValueError):
    """Unreadable or malformed input file."""


def q(x) -> int | str:
    x = as_fraction(x)
    return int(x) if x.denominator == 1 else fraction_str(x)


def qvec(v) -> list:
    return [q(a) for a in v]


def _mat(M: IntMatrix) -> list[list[int]]:
    return [list(r) for r in M.rows]


def _read_mat(rows, nrows: int, ncols: int) -> IntMatrix:
    if nrows == 0:
        return IntMatrix.zeros(0, ncols)
    M = IntMatrix.from_rows(rows, ncols)
    if M.shape != (nrows, ncols):
        raise SchemaError(f"matrix has shape {M.shape}, expected {(nrows, ncols)}")
    return M


def _head(kind: str) -> dict:
    return {"schema": SCHEMA, "kind": kind}


def _need(d: dict, *keys):
    for k in keys:
        if k not in d:
            raise SchemaError(f"missing field {k!r}")


# --------------------------------------------------------------------------
# fans, polytopes, stacky fans


def fan_to_json(F: Fan, head: bool = True) -> dict:
    out = _head("fan") if head else {}
    out.update({"rank": F.rank, "rays": [list(r) for r in F.rays],
                "cones": [sorted(c) for c in F.cones]})
    return out


def fan_from_json(d: dict) -> Fan:
    _need(d, "rank", "rays", "cones")
    return Fan(int(d["rank"]), tuple(tuple(r) for r in d["rays"]),
               tuple(frozenset(c) for c in d["cones"]))


def polytope_to_json(Q: LatticePolytope, head: bool = True) -> dict:
    out = _head("polytope") if head else {}
    out.update({"rank": Q.rank, "vertices": [qvec(v) for v in Q.vertices]})
    return out


def polytope_from_json(d: dict) -> LatticePolytope:
    _need(d, "rank", "vertices")
    return LatticePolytope.from_points(int(d["rank"]), d["vertices"])


def stacky_to_json(SF: StackyFan) -> dict:
    out = _head("stacky_fan")
    out.update({"beta": _mat(SF.beta), "rank_tilde": SF.fan_tilde.rank,
                "rays_tilde": [list(r) for r in SF.fan_tilde.rays],
                "cones_tilde": [sorted(c) for c in SF.fan_tilde.cones],
                "rank": SF.fan.rank, "rays": [list(r) for r in SF.fan.rays],
                "cones": [sorted(c) for c in SF.fan.cones], "cone_map": list(SF.cone_map)})
    return out


def stacky_from_json(d: dict) -> StackyFan:
    _need(d, "beta", "rays_tilde")
    rank_t = int(d.get("rank_tilde", len(d["rays_tilde"][0]) if d["rays_tilde"] else 0))
    up = Fan(rank_t, tuple(tuple(r) for r in d["rays_tilde"]),
             tuple(frozenset(c) for c in d.get("cones_tilde", [[]])))
    nrows = len(d["beta"])
    beta = _read_mat(d["beta"], nrows, rank_t)
    if "rays" in d and "cone_map" in d:
        down = Fan(int(d["rank"]), tuple(tuple(r) for r in d["rays"]), tuple(frozenset(c) for c in d["cones"]))
        return StackyFan(beta, up, down, tuple(d["cone_map"]))
    return StackyFan.from_beta(beta, up)


# --------------------------------------------------------------------------
# fanifolds


def fanifold_to_json(phi: FanifoldData) -> dict:
    out = _head("fanifold")
    out["strata"] = [{"id": s.id, "dim": s.dim, "label": s.label, "interior": s.interior,
                      "facets": [[f, flag] for f, flag in s.facets]} for s in phi.strata]
    out["fans"] = {sid: fan_to_json(F, head=False) for sid, F in phi.fans.items()}
    out["arrows"] = [{"src": a.src, "dst": a.dst, "cone": sorted(a.cone), "quotient": _mat(a.quotient)}
                     for a in phi.arrows]
    if phi.geometry is not None:
        out["geometry"] = {k: [qvec(p) for p in v] for k, v in phi.geometry.items()}
    if phi.ambient is not None:
        N, maps = phi.ambient
        out["ambient"] = {"rank": N, "maps": {k: _mat(M) for k, M in maps.items()}}
    return out


def fanifold_from_json(d: dict) -> FanifoldData:
    _need(d, "strata", "fans", "arrows")
    strata = tuple(Stratum(s["id"], int(s["dim"]), s.get("label", ""), bool(s.get("interior", True)),
                           tuple((f, flag) for f, flag in s.get("facets", [])))
                   for s in d["strata"])
    fans = {k: fan_from_json(v) for k, v in d["fans"].items()}
    arrows = []
    for a in d["arrows"]:
        _need(a, "src", "dst", "cone", "quotient")
        if a["src"] not in fans or a["dst"] not in fans:
            raise SchemaError(f"arrow {a['src']}->{a['dst']} refers to a stratum without a fan")
        arrows.append(Arrow(a["src"], a["dst"], frozenset(a["cone"]),
                            _read_mat(a["quotient"], fans[a["dst"]].rank, fans[a["src"]].rank)))
    geometry = None
    if "geometry" in d:
        geometry = {k: [tuple(as_fraction(x) for x in p) for p in v] for k, v in d["geometry"].items()}
    ambient = None
    if "ambient" in d:
        N = int(d["ambient"]["rank"])
        ambient = (N, {k: _read_mat(M, fans[k].rank, N) for k, M in d["ambient"]["maps"].items()})
    return FanifoldData(strata, fans, tuple(arrows), geometry, ambient)


def polytopes_to_json(polys: dict, scales: dict | None = None, identifications: dict | None = None) -> dict:
    out = _head("polytopes")
    out["polytopes"] = {k: polytope_to_json(Q, head=False) for k, Q in polys.items()}
    if scales:
        out["scales"] = dict(scales)
    if identifications:
        out["identifications"] = [{"stratum": s, "from": a, "to": b, "matrix": _mat(g)}
                                  for (s, a, b), g in identifications.items()]
    return out


def polytopes_from_json(d: dict) -> tuple[dict, dict, dict]:
    _need(d, "polytopes")
    polys = {k: polytope_from_json(v) for k, v in d["polytopes"].items()}
    scales = {k: int(v) for k, v in d.get("scales", {}).items()}
    ids = {}
    for e in d.get("identifications", []):
        r = len(e["matrix"])
        ids[(e["stratum"], e["from"], e["to"])] = _read_mat(e["matrix"], r, r)
    return polys, scales, ids


# --------------------------------------------------------------------------
# tropical data


def triangulation_to_json(T: Triangulation, mu) -> dict:
    out = _head("triangulation")
    out.update({"vertices": [list(v) for v in T.vertices], "simplices": [list(s) for s in T.simplices],
                "mu": [q(m) for m in mu]})
    return out


def triangulation_from_json(d: dict) -> tuple[Triangulation, list[Fraction]]:
    _need(d, "vertices", "simplices", "mu")
    T = Triangulation(tuple(tuple(v) for v in d["vertices"]), tuple(tuple(s) for s in d["simplices"]))
    mu = [as_fraction(m) for m in d["mu"]]
    if len(mu) != len(T.vertices):
        raise SchemaError("mu needs one value per vertex")
    return T, mu


def tropical_complex_to_json(PC: TropicalComplex) -> dict:
    out = _head("tropical_complex")
    out["dim"] = PC.dim
    out["cells"] = [{"label": sorted(c.label), "dim": c.dim,
                     "equations": [[list(u), q(k)] for u, k in c.equations],
                     "inequalities": [[list(u), q(k)] for u, k in c.inequalities],
                     "vertices": [qvec(v) for v in c.vertices], "rays": [list(r) for r in c.rays]}
                    for c in PC.cells]
    out["incidence"] = sorted([sorted(a), sorted(b)] for a, b in PC.incidence)
    return out


def tropical_complex_from_json(d: dict) -> TropicalComplex:
    cells = [TropicalCell(frozenset(c["label"]), int(c["dim"]),
                          tuple((tuple(u), as_fraction(k)) for u, k in c["equations"]),
                          tuple((tuple(u), as_fraction(k)) for u, k in c["inequalities"]),
                          tuple(tuple(as_fraction(x) for x in v) for v in c["vertices"]),
                          tuple(tuple(r) for r in c["rays"])) for c in d["cells"]]
    inc = {(frozenset(a), frozenset(b)) for a, b in d["incidence"]}
    return TropicalComplex(int(d["dim"]), cells, inc)


def dual_complex_to_json(psi: DualComplex) -> dict:
    out = _head("dual_complex")
    out["ambient"] = psi.ambient
    out["cells"] = [{"label": c.label, "stratum": c.stratum, "dim": c.dim, "level": c.level,
                     "vertices": [qvec(v) for v in c.vertices], "rays": [list(r) for r in c.rays]}
                    for c in psi.cells]
    out["incidence"] = sorted([a, b] for a, b in psi.incidence)
    return out


def dual_complex_from_json(d: dict) -> DualComplex:
    cells = [DualCell(c["label"], c["stratum"], int(c["dim"]),
                      tuple(tuple(as_fraction(x) for x in v) for v in c["vertices"]),
                      tuple(tuple(r) for r in c["rays"]), int(c.get("level", 0))) for c in d["cells"]]
    return DualComplex(int(d["ambient"]), cells, {(a, b) for a, b in d["incidence"]})


# --------------------------------------------------------------------------
# amoeba data


def family_to_json(fam: LaurentFamily) -> dict:
    out = _head("family")
    out["terms"] = [{"c": [c.real, c.imag], "alpha": list(a), "mu": q(mu)} for c, a, mu in fam.terms]
    out["t"] = fam.t
    return out


def family_from_json(d: dict) -> LaurentFamily:
    _need(d, "terms", "t")
    terms = []
    for t in d["terms"]:
        c = t.get("c", [1, 0])
        c = complex(c[0], c[1]) if isinstance(c, list) else complex(c)
        terms.append((c, tuple(t["alpha"]), as_fraction(t.get("mu", 0))))
    return LaurentFamily(tuple(terms), float(d["t"]))


CLOUD_HEADER = ["z1re", "z1im", "z2re", "z2im", "log1", "log2"]


def write_cloud_csv(cloud: SampleCloud, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CLOUD_HEADER)
        for z, L in zip(cloud.z, cloud.logs):
            row = [z[0].real, z[0].imag, z[1].real, z[1].imag, L[0], L[1]]
            w.writerow(["%.17g" % x for x in row])


def read_cloud_csv(path, log_t: float) -> SampleCloud:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    Z = data[:, 0:4:2] + 1j * data[:, 1:4:2]
    return SampleCloud(Z, data[:, 4:6], log_t)


# --------------------------------------------------------------------------
# files


LOADERS = {
    "fan": fan_from_json,
    "polytope": polytope_from_json,
    "stacky_fan": stacky_from_json,
    "fanifold": fanifold_from_json,
    "polytopes": polytopes_from_json,
    "triangulation": triangulation_from_json,
    "tropical_complex": tropical_complex_from_json,
    "dual_complex": dual_complex_from_json,
    "family": family_from_json,
}


def guess_kind(d: dict) -> str:
    if "kind" in d:
        return d["kind"]
    if "strata" in d:
        return "fanifold"
    if "beta" in d:
        return "stacky_fan"
    if "simplices" in d:
        return "triangulation"
    if "terms" in d:
        return "family"
    if "polytopes" in d:
        return "polytopes"
    if "cones" in d:
        return "fan"
    if "vertices" in d:
        return "polytope"
    raise SchemaError("cannot tell what kind of object this is")


def read_json(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise InputError(f"{path}: {e.strerror or e}") from None
    try:
        d = json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"{path}: malformed JSON at line {e.lineno}, column {e.colno}: {e.msg}") from None
    if not isinstance(d, dict):
        raise InputError(f"{path}: top level must be an object")
    if "schema" in d and d["schema"] != SCHEMA:
        raise SchemaError(f"{path}: unsupported schema {d['schema']!r}")
    return d


def load(path, kind: str | None = None) -> tuple[str, Any]:
    d = read_json(path)
    k = kind or guess_kind(d)
    if k not in LOADERS:
        raise SchemaError(f"unknown kind {k!r}")
    try:
        return k, LOADERS[k](d)
    except (KeyError, TypeError, IndexError) as e:
        raise SchemaError(f"{path}: bad {k} data ({e})") from None


def _scalar(x) -> bool:
    return not isinstance(x, (list, dict))


def _has_dict(obj) -> bool:
    if isinstance(obj, dict):
        return True
    return isinstance(obj, (list, tuple)) and any(_has_dict(x) for x in obj)


def _render(obj, ind: int) -> str:
    pad, inner = "  " * ind, "  " * (ind + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {_render(v, ind + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        # short numeric vectors and matrices stay on one line
        flat = json.dumps(obj, separators=(", ", ": "))
        if not _has_dict(obj) and (all(_scalar(x) for x in obj) or len(flat) <= 72):
            return flat
        items = [inner + _render(x, ind + 1) for x in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    return json.dumps(obj)


def dumps(obj: dict) -> str:
    """Indented JSON with numeric vectors kept on a single line."""
    return _render(obj, 0) + "\n"


def write_json(obj: dict, path=None) -> str:
    text = dumps(obj)
    if path is None or str(path) == "-":
        import sys

        sys.stdout.write(text)
    else:
        Path(path).write_text(text)
    return text
