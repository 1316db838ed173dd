"""Command-line driver: ``fanikit <command> ...``.

Exit status is 0 on success, 2 when the input fails validation and 1 on
I/O or schema errors.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__, catalog
from . import io as fio
from .amoeba import AmoebaError, LaurentFamily, convergence_report, eval_W, rescaled_distance, sample_curve, \
    scan_surface, RESIDUAL_TOL
from .dual import condition_vi_check, dual_filtration, dual_space
from .fan import Fan, StackyFan, quotient_fan, support_is_convex, validate_fan, validate_stacky
from .fanifold import (FanifoldData, filtration, handle_schedule, is_closed, sphere_fanifold,
                       validate_fanifold)
from .fibration import RetractionContext, retract, retract_oracle_check
from .fltz import chart_data, fltz_skeleton
from .lattice import as_fraction
from .svg import complex_svg, scatter_svg
from .tropical import (adapted_check, complement_components, dual_complex, grid_oracle,
                       psi_embedding_check, validate_triangulation)

log = logging.getLogger("fanikit")

OK, INVALID, IOERR = 0, 2, 1


class Invalid(Exception):
    """Raised to leave with the validation-failure status."""


@dataclass
class RunConfig:
    command: str
    inputs: list[str] = field(default_factory=list)
    out: str | None = None
    tol: float = RESIDUAL_TOL
    eps: float = 1e-3
    seed: int = 0

    def __post_init__(self):
        if not (self.tol > 0 and self.eps > 0):
            raise ValueError("tolerances must be positive")


def _emit(obj: dict, cfg: RunConfig) -> None:
    fio.write_json(obj, cfg.out)


def _report(kind: str, **fields) -> dict:
    out = {"schema": fio.SCHEMA, "kind": kind}
    out.update(fields)
    return out


def _load(path: str, *kinds: str):
    kind, obj = fio.load(path)
    if kinds and kind not in kinds:
        raise fio.SchemaError(f"{path}: expected {' or '.join(kinds)}, got {kind}")
    return kind, obj


def _fan_of(obj) -> Fan:
    return obj.fan if isinstance(obj, StackyFan) else obj


# --------------------------------------------------------------------------
# commands


def cmd_validate(args, cfg: RunConfig) -> int:
    kind, obj = _load(args.input, "fan", "stacky_fan", "fanifold")
    if kind == "fan":
        rep = validate_fan(obj)
        fails = [{"kind": v.kind, "detail": v.detail} for v in rep.violations]
        extra = {}
    elif kind == "stacky_fan":
        rep = validate_stacky(obj)
        fails = [{"kind": v.kind, "detail": v.detail} for v in rep.violations]
        extra = {"cokernel_torsion": list(rep.cokernel_torsion)}
    else:
        rep = validate_fanifold(obj)
        fails = [{"kind": f.kind, "detail": f.detail, "arrows": [list(a) for a in f.arrows]}
                 for f in rep.failures]
        extra = {"closed": is_closed(obj)} if rep.valid else {}
    valid = not fails
    _emit(_report("validation", object=kind, status="valid" if valid else "invalid", valid=valid,
                  failures=fails, **extra), cfg)
    return OK if valid else INVALID


def cmd_quotient(args, cfg: RunConfig) -> int:
    _, F = _load(args.input, "fan")
    _require_fan(F)
    if args.cone is not None:
        if not 0 <= args.cone < len(F.cones):
            raise Invalid(f"cone index {args.cone} out of range (fan has {len(F.cones)} cones)")
        sigma = args.cone
    else:
        rays = [int(x) for x in args.rays.split(",")] if args.rays else []
        if frozenset(rays) not in F.index:
            raise Invalid(f"rays {rays} do not span a cone of the fan")
        sigma = F.index[frozenset(rays)]
    Q = quotient_fan(F, sigma)
    out = fio.fan_to_json(Q.fan)
    out["projection"] = [list(r) for r in Q.projection.rows]
    out["cone_map"] = {str(k): v for k, v in sorted(Q.cone_map.items())}
    _emit(out, cfg)
    return OK


def _require_fan(F: Fan) -> None:
    rep = validate_fan(F)
    if not rep.valid:
        raise Invalid("; ".join(f"{v.kind}: {v.detail}" for v in rep.violations))


def cmd_fltz(args, cfg: RunConfig) -> int:
    kind, obj = _load(args.input, "fan", "stacky_fan", "fanifold")
    if kind == "fanifold":
        _require_fanifold(obj)
        sids = [args.stratum] if args.stratum else list(obj.ids)
        charts = []
        for sid in sids:
            ch = chart_data(obj, sid)
            charts.append({"stratum": sid, "codim": ch.codim, "strata": [_fltz_row(s) for s in ch.strata]})
        _emit(_report("fltz_charts", charts=charts), cfg)
        return OK
    if kind == "fan":
        _require_fan(obj)
    strata = fltz_skeleton(obj)
    _emit(_report("fltz", rank=_fan_of(obj).rank, strata=[_fltz_row(s) for s in strata]), cfg)
    return OK


def _fltz_row(s) -> dict:
    return {"index": s.index, "rays": [list(r) for r in s.cone.rays], "cone_dim": s.cone.dim,
            "annihilator": [list(g) for g in s.annihilator.generators()], "torus_dim": s.torus_dim, "component_order": s.component_order}


def _require_fanifold(phi: FanifoldData) -> None:
    rep = validate_fanifold(phi)
    if not rep.valid:
        raise Invalid("; ".join(f"{f.kind}: {f.detail}" for f in rep.failures))


def cmd_filtration(args, cfg: RunConfig) -> int:
    _, phi = _load(args.input, "fanifold")
    _require_fanifold(phi)
    stages = [{"stage": g.stage, "pieces": [p for p, _ in g.pieces],
               "interfaces": [{"stratum": s, "in_boundary": list(b)} for s, b in g.interfaces],
               "strata": list(g.strata)} for g in filtration(phi)]
    _emit(_report("filtration", closed=is_closed(phi), stages=stages), cfg)
    return OK


def cmd_schedule(args, cfg: RunConfig) -> int:
    _, phi = _load(args.input, "fanifold")
    _require_fanifold(phi)
    rows = [{"stage": h.stage, "stratum": h.stratum, "torus_rank": h.torus_rank, "base": h.base,
             "gluing_locus": [{"stratum": s, "cone": [list(r) for r in rays]} for s, rays in h.gluing_locus]}
            for h in handle_schedule(phi)]
    _emit(_report("handle_schedule", handles=rows), cfg)
    return OK


def _parse_point(text: str) -> tuple[Fraction, ...]:
    try:
        return tuple(as_fraction(Fraction(x.strip())) for x in text.split(","))
    except (ValueError, ZeroDivisionError):
        raise Invalid(f"cannot parse point {text!r}; use comma-separated p/q values") from None


def _parse_gram(text: str | None):
    if not text:
        return None
    return tuple(_parse_point(row) for row in text.split(";"))


def cmd_retract(args, cfg: RunConfig) -> int:
    _, F = _load(args.input, "fan")
    _require_fan(F)
    try:
        ctx = RetractionContext(F, _parse_gram(args.gram))
    except ValueError as e:
        raise Invalid(str(e)) from None
    pts = [_parse_point(p) for p in args.point or []]
    if args.random:
        rng = np.random.default_rng(cfg.seed)
        num = rng.integers(-20, 21, size=(args.random, F.rank))
        den = rng.integers(1, 9, size=(args.random, F.rank))
        pts += [tuple(Fraction(int(a), int(b)) for a, b in zip(n, d)) for n, d in zip(num, den)]
    for p in pts:
        if len(p) != F.rank:
            raise Invalid(f"point {[str(a) for a in p]} does not have {F.rank} coordinates")
    rows = [{"input": fio.qvec(p), "output": fio.qvec(retract(ctx, p))} for p in pts]
    out = _report("retraction", rank=F.rank, seed=cfg.seed, points=rows)
    if args.check:
        if not support_is_convex(F):
            raise Invalid("the nearest-point check needs a fan with convex support")
        rep = retract_oracle_check(ctx, pts)
        out["oracle"] = {"checked": rep.checked, "mismatches": len(rep.mismatches), "ok": rep.ok}
        _emit(out, cfg)
        return OK if rep.ok else INVALID
    _emit(out, cfg)
    return OK


def _load_polytopes(path):
    _, data = _load(path, "polytopes")
    return data


def cmd_dual(args, cfg: RunConfig) -> int:
    _, phi = _load(args.input, "fanifold")
    _require_fanifold(phi)
    polys, scales, ids = _load_polytopes(args.polytopes)
    cond = condition_vi_check(phi, polys, scales, ids)
    out = _report("dual", condition_vi={"ok": cond.ok,
                                        "failures": [{"kind": k, "detail": d} for k, d in cond.failures],
                                        "very_ample": {k: v for k, v in sorted(cond.very_ample.items())}})
    if not cond.ok:
        _emit(out, cfg)
        return INVALID
    psi = dual_space(phi, polys, scales, ids, check=False)
    out["complex"] = fio.dual_complex_to_json(psi)
    out["filtration"] = dual_filtration(psi)
    _emit(out, cfg)
    if args.svg:
        Path(args.svg).write_text(complex_svg(psi))
    return OK


def cmd_tropical(args, cfg: RunConfig) -> int:
    _, (T, mu) = _load(args.input, "triangulation")
    checks = args.check or ["adapted", "complex", "components"] + (["psi"] if args.fan else [])
    out = _report("tropical", checks=checks)
    ok = True
    tv = validate_triangulation(T)
    if not tv.ok:
        out["triangulation"] = {"ok": False, "failures": tv.failures}
        _emit(out, cfg)
        return INVALID
    ad = adapted_check(T, mu)
    if "adapted" in checks:
        out["adapted"] = {"ok": ad.ok, "failures": ad.failures}
        ok &= ad.ok
    if not ad.ok:
        _emit(out, cfg)
        return INVALID
    PC = None
    if "complex" in checks or "grid" in checks or args.svg:
        PC = dual_complex(T, mu)
        out["complex"] = fio.tropical_complex_to_json(PC)
    if "grid" in checks:
        g = grid_oracle(T, mu, PC)
        out["grid_oracle"] = {"ok": g.ok, "failures": g.failures[:20]}
        ok &= g.ok
    if "components" in checks:
        regs = complement_components(T, mu)
        out["components"] = {"count": len(regs), "vertices": len(T.vertices),
                             "ok": len(regs) == len(T.vertices),
                             "regions": [{"vertex": r.vertex, "exponent": list(r.exponent),
                                          "witness": fio.qvec(r.witness)} for r in regs]}
        ok &= len(regs) == len(T.vertices)
    if "psi" in checks:
        if not args.fan:
            raise Invalid("the psi check needs --fan")
        _, F = _load(args.fan, "fan")
        _require_fan(F)
        rep = psi_embedding_check(F, T, mu)
        out["psi"] = {"ok": rep.ok, "mapping": {k: sorted(v) for k, v in sorted(rep.mapping.items())},
                      "failures": rep.failures}
        ok &= rep.ok
    _emit(out, cfg)
    if args.svg and PC is not None and PC.dim == 2:
        Path(args.svg).write_text(complex_svg(PC))
    return OK if ok else INVALID


def _parse_ts(text: str) -> list[float]:
    return [float(x) for x in text.split(",")]


def _complex_from(path):
    _, (T, mu) = _load(path, "triangulation")
    return dual_complex(T, mu)


def cmd_amoeba(args, cfg: RunConfig) -> int:
    _, fam = _load(args.input, "family")
    PC = _complex_from(args.triangulation) if args.triangulation else None
    kw = dict(radii=args.radii, phases=args.phases, span=args.span, tol=cfg.tol)
    if args.mode == "convergence":
        if PC is None:
            raise Invalid("convergence mode needs --triangulation")
        ts = _parse_ts(args.ts) if args.ts else [1e2, 1e3, 1e4]
        rep = convergence_report(fam, PC, ts, **kw)
        rows = [{"t": r.t, "samples": r.samples, "sup": r.sup, "mean": r.mean,
                 "max_residual": r.max_residual, "skipped": r.skipped} for r in rep.rows]
        _emit(_report("amoeba_convergence", seed=cfg.seed, rows=rows, sup_decreasing=rep.sup_decreasing,
                      mean_trend_ok=rep.mean_trend_ok, ok=rep.ok), cfg)
        return OK if rep.ok else INVALID
    if fam.rank == 3:
        cloud = scan_surface(fam, n=args.radii, phases=min(args.phases, 8), span=args.span, eps=cfg.eps)
    else:
        cloud = sample_curve(fam, **kw)
    out = _report("amoeba_sample", t=fam.t, rank=fam.rank, samples=len(cloud), coarse=cloud.coarse,
                  skipped=len(cloud.skipped), rejected=cloud.rejected, seed=cfg.seed)
    if len(cloud.z):
        out["max_residual"] = float(np.abs(eval_W(fam, cloud.z)).max())
    if PC is not None and len(cloud):
        d = rescaled_distance(cloud, PC)
        out["distance"] = {"sup": d.sup, "mean": d.mean, "worst": [float(x) for x in d.worst]}
    if args.csv:
        if fam.rank != 2:
            raise Invalid("CSV clouds are written for rank-2 families only")
        fio.write_cloud_csv(cloud, args.csv)
    if args.svg:
        if PC is None or PC.dim != 2:
            raise Invalid("the scatter overlay needs a rank-2 --triangulation")
        Path(args.svg).write_text(scatter_svg(PC, cloud.rescaled))
    _emit(out, cfg)
    return OK


def cmd_report(args, cfg: RunConfig) -> int:
    outdir = Path(args.out_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    bundle = _report("report")
    status = OK
    if args.fanifold:
        _, phi = _load(args.fanifold, "fanifold")
        rep = validate_fanifold(phi)
        bundle["fanifold"] = {"valid": rep.valid, "failures": sorted(rep.kinds())}
        if rep.valid:
            bundle["fanifold"]["closed"] = is_closed(phi)
            bundle["filtration"] = [list(g.strata) for g in filtration(phi)]
            bundle["schedule"] = [[h.stratum, h.torus_rank] for h in handle_schedule(phi)]
            if args.polytopes:
                polys, scales, ids = _load_polytopes(args.polytopes)
                cond = condition_vi_check(phi, polys, scales, ids)
                bundle["condition_vi"] = {"ok": cond.ok, "failures": [list(f) for f in cond.failures]}
                if cond.ok:
                    psi = dual_space(phi, polys, scales, ids, check=False)
                    bundle["dual"] = fio.dual_complex_to_json(psi)
                    if psi.ambient == 2:
                        (outdir / "dual.svg").write_text(complex_svg(psi))
                else:
                    status = INVALID
        else:
            status = INVALID
    if args.triangulation:
        _, (T, mu) = _load(args.triangulation, "triangulation")
        ad = adapted_check(T, mu)
        bundle["adapted"] = {"ok": ad.ok, "failures": ad.failures}
        if ad.ok:
            PC = dual_complex(T, mu)
            bundle["tropical"] = fio.tropical_complex_to_json(PC)
            if PC.dim == 2:
                (outdir / "tropical.svg").write_text(complex_svg(PC))
            if args.family:
                _, fam = _load(args.family, "family")
                cloud = sample_curve(fam, radii=args.radii, phases=args.phases, tol=cfg.tol)
                d = rescaled_distance(cloud, PC)
                bundle["amoeba"] = {"t": fam.t, "samples": len(cloud), "sup": d.sup, "mean": d.mean}
                (outdir / "amoeba.svg").write_text(scatter_svg(PC, cloud.rescaled))
        else:
            status = INVALID
    fio.write_json(bundle, outdir / "report.json")
    if cfg.out:
        fio.write_json(bundle, cfg.out)
    return status


CATALOG = {
    "square": lambda: fio.fanifold_to_json(catalog.square_fanifold()),
    "square-polytopes": lambda: fio.polytopes_to_json(catalog.square_polytopes()),
    "p1": lambda: fio.fan_to_json(catalog.p1()),
    "p2": lambda: fio.fan_to_json(catalog.projective_space(2)),
    "a2": lambda: fio.fan_to_json(catalog.affine_space(2)),
    "a3-minus-rays": lambda: fio.fan_to_json(catalog.affine_minus_rays(3)),
    "stacky-a1": lambda: fio.stacky_to_json(catalog.stacky_a1(2)),
    "sphere-p2": lambda: fio.fanifold_to_json(sphere_fanifold(catalog.projective_space(2))),
    "tropical-line": lambda: _tropical_line(),
    "line-family": lambda: fio.family_to_json(LaurentFamily.from_pl([(0, 0), (1, 0), (0, 1)], [0, 0, 0], 1e4)),
}


def _tropical_line() -> dict:
    from .tropical import Triangulation

    T = Triangulation(((0, 0), (1, 0), (0, 1)), ((0, 1, 2),))
    return fio.triangulation_to_json(T, [0, 0, 0])


def cmd_catalog(args, cfg: RunConfig) -> int:
    if args.name is None:
        sys.stdout.write("\n".join(sorted(CATALOG)) + "\n")
        return OK
    _emit(CATALOG[args.name](), cfg)
    return OK


# --------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fanikit", description="Fanifolds, dual spaces, tropical complexes and amoebas.")
    p.add_argument("--version", action="version", version=f"fanikit {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-o", "--out", help="write JSON here instead of stdout")
    common.add_argument("--tol", type=float, default=RESIDUAL_TOL, help="residual bound for amoeba samples")
    common.add_argument("--eps", type=float, default=1e-3, help="relative threshold of the 3-D scan")
    common.add_argument("--seed", type=int, default=0, help="seed for random sampling")
    common.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, metavar="command")

    s = sub.add_parser("validate", parents=[common], help="validate a fan, stacky fan or fanifold")
    s.add_argument("input")
    s.set_defaults(fn=cmd_validate)

    s = sub.add_parser("quotient", parents=[common], help="quotient fan by a cone")
    s.add_argument("input")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--cone", type=int, help="cone index")
    g.add_argument("--rays", help="comma-separated ray indices")
    s.set_defaults(fn=cmd_quotient)

    s = sub.add_parser("fltz", parents=[common], help="FLTZ skeleton strata or fanifold chart data")
    s.add_argument("input")
    s.add_argument("--stratum", help="only this stratum (fanifold input)")
    s.set_defaults(fn=cmd_fltz)

    s = sub.add_parser("filtration", parents=[common], help="filtration by gluing stages")
    s.add_argument("input")
    s.set_defaults(fn=cmd_filtration)

    s = sub.add_parser("schedule", parents=[common], help="handle attachment schedule")
    s.add_argument("input")
    s.set_defaults(fn=cmd_schedule)

    s = sub.add_parser("retract", parents=[common], help="retract rational points onto the fan support")
    s.add_argument("input")
    s.add_argument("--point", action="append", help='point as "p/q,p/q,..." (repeatable)')
    s.add_argument("--random", type=int, default=0, help="also retract this many random points")
    s.add_argument("--gram", help='inner product as rows "a,b;c,d"')
    s.add_argument("--check", action="store_true", help="compare with the nearest-point oracle")
    s.set_defaults(fn=cmd_retract)

    s = sub.add_parser("dual", parents=[common], help="condition (vi) and the dual stratified space")
    s.add_argument("input")
    s.add_argument("--polytopes", required=True)
    s.add_argument("--svg")
    s.set_defaults(fn=cmd_dual)

    s = sub.add_parser("tropical", parents=[common], help="tropical dual complex and checks")
    s.add_argument("input")
    s.add_argument("--check", action="append", choices=["adapted", "complex", "components", "grid", "psi"])
    s.add_argument("--fan", help="fan for the psi check")
    s.add_argument("--svg")
    s.set_defaults(fn=cmd_tropical)

    s = sub.add_parser("amoeba", parents=[common], help="sample amoebas and measure convergence")
    s.add_argument("input")
    s.add_argument("--mode", choices=["sample", "convergence"], default="sample")
    s.add_argument("--triangulation", help="triangulation whose tropical complex to compare with")
    s.add_argument("--ts", help="comma-separated t values for convergence")
    s.add_argument("--radii", type=int, default=64)
    s.add_argument("--phases", type=int, default=64)
    s.add_argument("--span", type=float, default=2.0)
    s.add_argument("--csv")
    s.add_argument("--svg")
    s.set_defaults(fn=cmd_amoeba)

    s = sub.add_parser("report", parents=[common], help="bundle JSON and SVG views into a directory")
    s.add_argument("out_dir")
    s.add_argument("--fanifold")
    s.add_argument("--polytopes")
    s.add_argument("--triangulation")
    s.add_argument("--family")
    s.add_argument("--radii", type=int, default=64)
    s.add_argument("--phases", type=int, default=64)
    s.set_defaults(fn=cmd_report)

    s = sub.add_parser("catalog", parents=[common], help="emit a built-in example")
    s.add_argument("name", nargs="?", choices=sorted(CATALOG))
    s.set_defaults(fn=cmd_catalog)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = RunConfig(args.command, [getattr(args, "input", "")], args.out, args.tol, args.eps, args.seed)
    except ValueError as e:
        print(f"fanikit: {e}", file=sys.stderr)
        return IOERR
    try:
        return args.fn(args, cfg)
    except (fio.InputError, fio.SchemaError, OSError) as e:
        print(f"fanikit: {e}", file=sys.stderr)
        return IOERR
    except (Invalid, AmoebaError) as e:
        print(f"fanikit: invalid input: {e}", file=sys.stderr)
        return INVALID
    except ValueError as e:
        # library-level rejections (bad fans, polytopes, triangulations)
        print(f"fanikit: invalid input: {e}", file=sys.stderr)
        return INVALID


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
