"""Command line front end.

    hypspec build    --spec S.json --out DIR
    hypspec spectrum --spec S.json --cutoff 4.0 --out DIR
    hypspec verify   --spec S.json --suite intersection
    hypspec recover  --spec S.json --schedule n^3,n^2,n --n-max 6 --out DIR

Exit codes: 0 ok, 2 bad input, 3 relator check failed, 4 cutoff below the
systole, 5 a verified property failed, 6 angle clustering failed.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from pathlib import Path
from typing import Optional

import jsonschema

from . import __version__
from .config import Tolerances

EXIT_OK, EXIT_SCHEMA, EXIT_RELATOR, EXIT_CUTOFF, EXIT_VERIFY, EXIT_CLUSTER = 0, 2, 3, 4, 5, 6

SPEC_SCHEMA = {
    "type": "object",
    "required": ["genus", "pants_graph", "lengths", "twists"],
    "additionalProperties": False,
    "properties": {
        "genus": {"type": "integer", "minimum": 2},
        "pants_graph": {
            "type": "array",
            "items": {"type": "array", "items": {"type": "integer", "minimum": 0},
                      "minItems": 4, "maxItems": 4},
        },
        "lengths": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}},
        "twists": {"type": "array", "items": {"type": "number"}},
        "label": {"type": "string"},
    },
}


class InputError(Exception):
    pass


def load_spec(path) -> dict:
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise InputError(f"cannot read spec {path}: {e}")
    try:
        jsonschema.validate(doc, SPEC_SCHEMA)
    except jsonschema.ValidationError as e:
        raise InputError(f"spec {path}: {e.message}")
    m = 3 * doc["genus"] - 3
    for key in ("pants_graph", "lengths", "twists"):
        if len(doc[key]) != m:
            raise InputError(f"spec {path}: {key} needs {m} entries for genus {doc['genus']}")
    return doc


def fn_from_spec(doc: dict):
    from .surface import FenchelNielsen, InvalidSurfaceData, PantsGraph
    try:
        graph = PantsGraph(2 * doc["genus"] - 2, tuple(tuple(g) for g in doc["pants_graph"]))
        return FenchelNielsen(graph, tuple(doc["lengths"]), tuple(doc["twists"]))
    except InvalidSurfaceData as e:
        raise InputError(str(e))


def reference_spec() -> dict:
    from .surface import reference_fn
    fn = reference_fn()
    return {"genus": 2, "pants_graph": [list(g) for g in fn.graph.gluings],
            "lengths": list(fn.lengths), "twists": list(fn.twists), "label": "reference"}


def tolerances(args) -> Tolerances:
    t = Tolerances(matrix=args.tol_matrix, geometric=args.tol_geometric,
                   angle_dedup=args.tol_angle, relator=args.tol_relator)
    for k, v in t.__dict__.items():
        if not v > 0:
            raise InputError(f"tolerance {k} must be positive")
    return t


def config_hash(spec: dict, config: dict) -> str:
    blob = json.dumps({"spec": spec, "config": config}, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def workers(args) -> int:
    if args.workers is not None:
        return max(1, args.workers)
    try:
        return max(1, int(os.environ.get("HYPSPEC_WORKERS", "1")))
    except ValueError:
        return 1


def _write(out: Optional[str], name: str, text: str):
    if out is None:
        return
    d = Path(out)
    d.mkdir(parents=True, exist_ok=True)
    (d / name).write_text(text)


def _dump(doc) -> str:
    return json.dumps(doc, indent=1, sort_keys=True, default=_jsonable) + "\n"


def _jsonable(x):
    if hasattr(x, "item"):
        return x.item()
    if isinstance(x, tuple):
        return list(x)
    raise TypeError(f"cannot serialize {type(x).__name__}")


def _stamp(h: str, config: dict) -> dict:
    return {"tool": "hypspec", "version": __version__, "config_hash": h, "config": config}


def _surface(args, config: dict):
    from .surface import RelatorCheckFailed, build_surface
    spec = load_spec(args.spec)
    tol = tolerances(args)
    config = dict(config, tolerances=tol.__dict__)
    h = config_hash(spec, config)
    args.config = config
    try:
        s = build_surface(fn_from_spec(spec), tol)
    except RelatorCheckFailed as e:
        print(f"relator check failed: {e}", file=sys.stderr)
        raise SystemExit(EXIT_RELATOR)
    return spec, s, h


# ---------------------------------------------------------------- commands

def cmd_build(args) -> int:
    from .words import format_word
    spec, s, h = _surface(args, {"command": "build"})
    doc = dict(_stamp(h, args.config), spec=spec, generators={
        n: [repr(float(x)) for x in s.generators[n].entries] for n in s.names},
        relators=[format_word(r) for r in s.relators],
        pants_curves=[format_word(w) for w in s.pants_curve_words],
        relator_residual=s.relator_residual)
    _write(args.out, "surface.json", _dump(doc))
    print(f"built genus {s.genus} surface, relator residual {s.relator_residual:.3e}")
    return EXIT_OK


def cmd_spectrum(args) -> int:
    from .spectrum import CutoffTooSmall, length_angle_spectrum
    spec, s, h = _surface(args, {"command": "spectrum", "cutoff": args.cutoff})
    try:
        sl = length_angle_spectrum(s, args.cutoff, workers=workers(args))
    except CutoffTooSmall as e:
        print(str(e), file=sys.stderr)
        return EXIT_CUTOFF
    head = f"# hypspec {__version__} config {h}\n"
    _write(args.out, "spectrum.csv", head + sl.to_csv())
    _write(args.out, "spectrum.json", sl.to_json(extra=_stamp(h, args.config)) + "\n")
    if args.out is None:
        sys.stdout.write(head + sl.to_csv())
    else:
        print(f"{len(sl.geodesics)} simple geodesics, {len(sl.records)} records")
    return EXIT_OK


def cmd_verify(args) -> int:
    from ._suites import SUITES
    from . import curves
    spec, s, h = _surface(args, {"command": "verify", "suite": args.suite,
                                 "fault": args.inject_fault})
    if args.inject_fault == "crossing-sign":
        # negative control: splice every twist loop with the same orientation
        curves._crossing_exponent = lambda n, angle: n * curves.TWIST_SIGN
    results = SUITES[args.suite](s)
    for r in results:
        print(r.line())
    doc = dict(_stamp(h, args.config), suite=args.suite,
               results=[{"name": r.name, "ok": r.ok, "margin": r.margin, "detail": r.detail}
                        for r in results])
    _write(args.out, f"verify_{args.suite}.json", _dump(doc))
    failed = [r.name for r in results if not r.ok]
    if failed:
        print("failed: " + ", ".join(failed), file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def default_gamma0(s):
    """Shortest non-separating simple curve crossing the first pants curve once."""
    from .curves import geom_intersection, is_separating
    from .spectrum import enumerate_scg
    a = s.pants_curves[0]
    for g in enumerate_scg(s, 6.0):
        if not is_separating(s, g) and geom_intersection(s, g, a) == 1:
            return g
    raise InputError("no default base curve found; pass --gamma0")


def cmd_recover(args) -> int:
    from .angles import angle_set_multi
    from .curves import TrivialClass, geodesic_rep
    from .reconstruct import (ClusterFailure, SearchExhausted, construct_special_pants,
                              min_gap, parse_schedule, recover_from_spectrum, sweep)
    try:
        sched = parse_schedule(args.schedule)
    except ValueError as e:
        raise InputError(str(e))
    spec, s, h = _surface(args, {"command": "recover", "schedule": list(sched),
                                 "n_max": args.n_max, "gamma0": args.gamma0,
                                 "budget": args.budget, "eps": args.eps})
    if len(sched) != 3 * s.genus - 3:
        raise InputError(f"schedule needs {3 * s.genus - 3} terms")
    try:
        g0 = geodesic_rep(s, s.parse(args.gamma0)) if args.gamma0 else default_gamma0(s)
    except (KeyError, TrivialClass, ValueError) as e:
        raise InputError(f"bad base curve: {e}")
    try:
        P = construct_special_pants(s, g0, budget=args.budget)
    except SearchExhausted as e:
        print(str(e), file=sys.stderr)
        return EXIT_VERIFY
    pts = sweep(s, g0, P, sched, range(2, args.n_max + 1))
    ref = angle_set_multi(s, g0, P.curves, [str(i + 1) for i in range(len(P.curves))])
    eps = args.eps if args.eps is not None else min_gap(ref.thetas) / 4
    try:
        rep = recover_from_spectrum(pts, eps=eps, schedule=sched,
                                    reference_angles=[float(t) for t in ref.thetas],
                                    reference_lengths=[c.length for c in P.curves])
    except ClusterFailure as e:
        print(f"cluster failure: {e}", file=sys.stderr)
        return EXIT_CLUSTER
    doc = dict(_stamp(h, args.config), gamma0=str(g0.cls), pants=[str(c.cls) for c in P.curves],
               pants_lengths=[c.length for c in P.curves], phi_margin=P.phi_margin,
               twists_applied=P.twists_applied,
               reference_angles=[float(t) for t in ref.thetas], report=rep.as_dict(),
               errors_csv=rep.errors_csv())
    _write(args.out, "recovery.json", _dump(doc))
    _write(args.out, "recovery_errors.csv", f"# hypspec {__version__} config {h}\n" + rep.errors_csv())
    for w in rep.warnings:
        print("warning: " + w)
    print(f"angles: {len(rep.recovered_angles)} clusters, error {rep.angle_error}")
    print("lengths: " + ", ".join(f"{x:.9f}" for x in rep.recovered_lengths))
    print("success" if rep.success() else "not successful")
    return EXIT_OK


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hypspec", description="Length-angle spectra of "
                                "closed hyperbolic surfaces.")
    p.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--spec", required=True, help="surface spec JSON")
    common.add_argument("--out", help="output directory")
    common.add_argument("--workers", type=int, help="thread count (default $HYPSPEC_WORKERS or 1)")
    d = Tolerances()
    common.add_argument("--tol-matrix", type=float, default=d.matrix)
    common.add_argument("--tol-geometric", type=float, default=d.geometric)
    common.add_argument("--tol-angle", type=float, default=d.angle_dedup)
    common.add_argument("--tol-relator", type=float, default=d.relator)
    sub = p.add_subparsers(dest="command", required=True)
    b = sub.add_parser("build", parents=[common], help="build a surface and check its relator")
    b.set_defaults(func=cmd_build)
    sp = sub.add_parser("spectrum", parents=[common], help="length-angle spectrum to a cutoff")
    sp.add_argument("--cutoff", type=float, required=True)
    sp.set_defaults(func=cmd_spectrum)
    v = sub.add_parser("verify", parents=[common], help="run a property suite")
    v.add_argument("--suite", required=True,
                   choices=["intersection", "length", "angles", "collars"])
    v.add_argument("--inject-fault", choices=["crossing-sign"], help=argparse.SUPPRESS)
    v.set_defaults(func=cmd_verify)
    r = sub.add_parser("recover", parents=[common], help="recover angles and lengths from a sweep")
    r.add_argument("--schedule", default="n^3,n^2,n")
    r.add_argument("--n-max", type=int, default=6)
    r.add_argument("--gamma0", help="base curve word, e.g. b2")
    r.add_argument("--budget", type=int, default=64, help="twist budget per pants curve")
    r.add_argument("--eps", type=float,
                   help="cluster window half-width (default: a quarter of the smallest angle gap)")
    r.set_defaults(func=cmd_recover)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_SCHEMA
    except SystemExit as e:
        return int(e.code or 0)


if __name__ == "__main__":
    sys.exit(main())
