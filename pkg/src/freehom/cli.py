"""Command line interface: ``freehom <verb> ...``; every verb prints JSON."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .cache import IntersectionCache
from .filling import build_fatgraph, complement_report
from .geometry import FuchsianRep, GeometryError, translation_length
from .intersection import (
    RadiusExhausted, SameCurveError, intersection_number, trace_pair, tracing_oracle_count,
)
from .orbit_models import StripModel, SuspensionModel, singleton_check, strip_scene
from .reports import SCHEMA_VERSION, JobSpecError, dumps, run_classify
from .figures import emit_strip_svg, emit_surface_svg
from .words import WordError, format_word


def _doc(kind: str, **body) -> dict:
    return {"schema_version": SCHEMA_VERSION, "kind": kind, **body}


def cmd_classify(args) -> int:
    doc, status = run_classify(args.job, args.out, args.cache, args.emit_svg)
    if args.out is None:
        sys.stdout.write(dumps(doc))
    return status


def cmd_intersect(args) -> int:
    rep = FuchsianRep(args.genus)
    cache = IntersectionCache(args.cache) if args.cache else None
    res = intersection_number(args.w, args.v, rep, args.radius, cache)
    body = {"genus": args.genus, "w": str(rep.presentation.canonical(args.w_word(rep))),
            "v": str(rep.presentation.canonical(args.v_word(rep))),
            "count": res.count, "radius_used": res.radius_used}
    if args.oracle:
        try:
            body["oracle_count"] = tracing_oracle_count(args.w, args.v, rep)
        except SameCurveError as exc:
            body["oracle_count"] = None
            body["oracle_error"] = str(exc)
    if cache is not None:
        cache.save()
    if args.emit_svg:
        tw, tv, cr = trace_pair(rep, rep.presentation.canonical(args.w_word(rep)),
                                rep.presentation.canonical(args.v_word(rep)))
        body["figure"] = emit_surface_svg(rep, [tw, tv], Path(args.emit_svg) / "intersect.svg",
                                          [c.point for c in cr])
    sys.stdout.write(dumps(_doc("intersection", **body)))
    return 0


def cmd_fills(args) -> int:
    rep = FuchsianRep(args.genus)
    g = build_fatgraph(args.w, rep)
    report = complement_report(args.w, rep, g)
    body = {"genus": args.genus, "curve": str(g.base), **report.to_json()}
    if args.emit_svg:
        body["figure"] = emit_surface_svg(rep, [g.trace], Path(args.emit_svg) / "fills.svg",
                                          g.points)
    sys.stdout.write(dumps(_doc("complement", **body)))
    return 0


def cmd_strip(args) -> int:
    scene = strip_scene(StripModel(args.epsilon), args.k)
    if args.emit_svg:
        scene["figure"] = emit_strip_svg(scene, Path(args.emit_svg) / "strip.svg")
    sys.stdout.write(dumps(scene))
    return 0


def cmd_suspension(args) -> int:
    sm = SuspensionModel()
    rep = singleton_check(sm, (0.0, 0.0, 0.0), (args.dx, args.dy, 0.0),
                          t_range=(args.t_min, args.t_max), threshold=args.threshold)
    sys.stdout.write(dumps(_doc("suspension_check", lam1=sm.lam1, lam2=sm.lam2,
                                **rep.to_json())))
    return 0 if rep.unbounded else 1


def cmd_trace(args) -> int:
    rep = FuchsianRep(args.genus)
    c = rep.presentation.canonical(args.w_word(rep))
    tr, _, crossings = trace_pair(rep, c)
    body = {
        "genus": args.genus, "curve": str(c),
        "domain_sides": len(tr.domain.sides),
        "translation_length": translation_length(rep.evaluate(c)),
        "trace_length": tr.length,
        "holonomy": format_word(tr.holonomy),
        "closure_defect": tr.closure_defect,
        "self_crossings": len(crossings),
        "segments": [{"start": [s.start.real, s.start.imag], "end": [s.end.real, s.end.imag],
                      "exit": format_word(s.exit_word)} for s in tr.segments],
    }
    if args.emit_svg:
        body["figure"] = emit_surface_svg(rep, [tr], Path(args.emit_svg) / "trace.svg",
                                          [x.point for x in crossings])
    sys.stdout.write(dumps(_doc("trace", **body)))
    return 0


def _word_args(p: argparse.ArgumentParser, *names: str) -> None:
    for n in names:
        p.add_argument(n, help="word such as 'a1 b1 A1 B1'")


def _common(suppress: bool) -> argparse.ArgumentParser:
    # flags are accepted before or after the verb; after-verb copies default
    # to SUPPRESS so they do not clobber values given before the verb
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--genus", type=int, default=d(2))
    common.add_argument("--radius", type=int, default=d(None),
                        help="starting word-length radius for double-coset search")
    common.add_argument("--cache", default=d(None), help="intersection cache file (JSON)")
    common.add_argument("--emit-svg", default=d(None), metavar="DIR",
                        help="write SVG figures into DIR")
    common.add_argument("-v", "--verbose", action="store_true", default=d(False))
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common(suppress=True)
    parser = argparse.ArgumentParser(prog="freehom", parents=[_common(suppress=False)],
                                     description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("classify", parents=[common], help="classify orbits of a surgery job")
    p.add_argument("job")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_classify)

    p = sub.add_parser("intersect", parents=[common], help="geometric intersection number")
    _word_args(p, "w", "v")
    p.add_argument("--oracle", action="store_true", help="also run the tracing count")
    p.set_defaults(fn=cmd_intersect)

    p = sub.add_parser("fills", parents=[common], help="complement of a closed geodesic")
    _word_args(p, "w")
    p.set_defaults(fn=cmd_fills)

    p = sub.add_parser("strip-model", parents=[common], help="skewed strip scene")
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--epsilon", type=float, default=0.2)
    p.set_defaults(fn=cmd_strip)

    p = sub.add_parser("suspension-check", parents=[common], help="orbit separation")
    p.add_argument("--dx", type=float, default=1.0)
    p.add_argument("--dy", type=float, default=0.0)
    p.add_argument("--t-min", type=float, default=0.0)
    p.add_argument("--t-max", type=float, default=20.0)
    p.add_argument("--threshold", type=float, default=1e6)
    p.set_defaults(fn=cmd_suspension)

    p = sub.add_parser("trace", parents=[common], help="trace a geodesic through the polygon")
    _word_args(p, "w")
    p.set_defaults(fn=cmd_trace)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    args.w_word = lambda rep: rep.presentation.parse(args.w)
    args.v_word = lambda rep: rep.presentation.parse(args.v)
    try:
        return args.fn(args)
    except JobSpecError as exc:
        print(f"error: job file: {exc}", file=sys.stderr)
        return 2
    except (WordError, ValueError, GeometryError, RadiusExhausted, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
