"""Command line front end: ``nilsym validate|analyze|gallery|fuzz|geodesic``.

Exit codes: 0 ok, 1 mathematical failure, 2 usage or schema error.
Reports go to stdout as JSON, diagnostics to stderr. ``NILSYM_TOL``
overrides the default absolute tolerance.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import replace

import numpy as np

from . import __version__
from .dataset import build_nilpotent, validate_data_set
from .document import SchemaError, canonical_json, load_document, round_floats, to_document
from .errors import NilsymError
from .gallery import GALLERY, get_example, random_lorentzian_data_set
from .geometry import geodesic_residual, killing_flow
from .isotropy import isotropy_split
from .liealg import is_two_step_nilpotent, skew_derivations
from .numkernel import DEFAULT_TOL, TolerancePolicy
from .pipeline import analyze, fuzz_invariants
from .symmetry import transvection_space

EXIT_OK, EXIT_MATH, EXIT_USAGE = 0, 1, 2


def _policy(args) -> TolerancePolicy:
    tol = DEFAULT_TOL
    env = os.environ.get("NILSYM_TOL")
    try:
        if env:
            tol = replace(tol, abs_tol=float(env))
        if getattr(args, "tol", None) is not None:
            tol = replace(tol, abs_tol=float(args.tol))
    except ValueError as exc:
        raise SchemaError(f"bad tolerance: {exc}") from None
    return tol


def _emit(obj) -> None:
    sys.stdout.write(canonical_json(obj))


def cmd_validate(args) -> int:
    tol = _policy(args)
    doc = load_document(args.path, tol)
    tol = doc.policy(tol)
    if doc.kind == "data_set":
        rep = validate_data_set(doc.payload, tol)
        _emit({"kind": doc.kind, "name": doc.name, **rep.as_dict()})
        return EXIT_OK if rep.valid else EXIT_MATH
    ok = is_two_step_nilpotent(doc.payload, tol)
    _emit({"kind": doc.kind, "name": doc.name, "valid": ok, "two_step_nilpotent": ok})
    return EXIT_OK if ok else EXIT_MATH


def _pretty(rep: dict) -> str:
    lines = [f"nilsym {rep.get('version')}  seed={rep.get('seed')}  input={rep['input'].get('name', '')}"]
    for key in ("validation", "flat_factor", "natred", "decomposition", "isotropy", "symmetry"):
        if key not in rep:
            continue
        val = rep[key]
        if isinstance(val, dict):
            short = {k: v for k, v in val.items() if not isinstance(v, (dict, list))}
            lines.append(f"{key:>14}: " + ", ".join(f"{k}={v}" for k, v in sorted(short.items())))
    lines.append(f"{'failures':>14}: {rep.get('failures')}")
    return "\n".join(lines) + "\n"


def cmd_analyze(args) -> int:
    tol = _policy(args)
    doc = load_document(args.path, tol)
    an = analyze(doc, seed=args.seed, tol=tol)
    if args.pretty:
        sys.stdout.write(_pretty(round_floats(an.report)))
    else:
        _emit(an.report)
    for f in an.failures:
        print(f"nilsym: stage failed: {f}", file=sys.stderr)
    return an.exit_code


def cmd_gallery(args) -> int:
    if args.name is None:
        _emit({"examples": sorted(GALLERY)})
        return EXIT_OK
    try:
        ex = get_example(args.name)
    except KeyError as exc:
        print(f"nilsym: {exc.args[0]}", file=sys.stderr)
        return EXIT_USAGE
    _emit(to_document(ex, args.name))
    return EXIT_OK


def instance_rng(seed: int, index: int) -> np.random.Generator:
    """Independent stream for fuzz instance ``index`` under the master seed."""
    return np.random.default_rng([seed, index])


def cmd_fuzz(args) -> int:
    tol = _policy(args)
    if args.count < 0 or args.max_dim < 3:
        print("nilsym: --count must be >= 0 and --max-dim >= 3", file=sys.stderr)
        return EXIT_USAGE
    failures = []
    for i in range(args.count):
        d = random_lorentzian_data_set(instance_rng(args.seed, i), max_dim=args.max_dim)
        bad = fuzz_invariants(d, seed=args.seed, tol=tol)
        if bad:
            failures.append({"index": i, "seed": args.seed, "dim": d.dim, "failed": bad})
            print(f"nilsym: instance {i} (seed {args.seed}) failed {bad}", file=sys.stderr)
    _emit({"count": args.count, "seed": args.seed, "max_dim": args.max_dim,
           "failures": failures, "version": __version__})
    return EXIT_MATH if failures else EXIT_OK


def _parse_vector(text: str, n: int) -> np.ndarray:
    try:
        vals = [float(x) for x in text.split(",")]
    except ValueError:
        raise SchemaError(f"cannot parse vector {text!r}") from None
    if len(vals) != n:
        raise SchemaError(f"vector needs {n} entries, got {len(vals)}")
    return np.array(vals)


def cmd_geodesic(args) -> int:
    tol = _policy(args)
    doc = load_document(args.path, tol)
    tol = doc.policy(tol)
    if doc.kind == "data_set":
        L = build_nilpotent(doc.payload, tol)
        haut = isotropy_split(doc.payload, tol).orthonormal_basis(tol)
    else:
        L = doc.payload
        haut = skew_derivations(L, tol)
    if args.u is not None:
        # explicit (u, 0) pair, generally not a transvection
        u, dm = _parse_vector(args.u, L.dim), np.zeros((L.dim, L.dim))
        label = "custom"
    else:
        ts = transvection_space(L, haut, tol)
        if not 0 <= args.pair < len(ts.basis):
            print(f"nilsym: pair {args.pair} out of range (found {len(ts.basis)} transvections)", file=sys.stderr)
            return EXIT_USAGE
        p = ts.basis[args.pair]
        u, dm = p.u, p.d
        label = f"transvection[{args.pair}]"
    if args.step <= 0 or args.t_end < 0:
        print("nilsym: need --step > 0 and --t-end >= 0", file=sys.stderr)
        return EXIT_USAGE
    nsteps = int(np.ceil(args.t_end / args.step - 1e-12)) if args.t_end > 0 else 0
    ts_grid = np.linspace(0.0, args.t_end, nsteps + 1)
    x0 = np.zeros(L.dim)
    rows, worst = [], 0.0
    for t in ts_grid:
        x = killing_flow(L, u, dm, x0, t)
        r = geodesic_residual(L, u, dm, [t])
        worst = max(worst, r)
        rows.append([t, *x, r])
    if args.csv:
        with open(args.csv, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["t", *[f"x{i + 1}" for i in range(L.dim)], "residual"])
            for row in rows:
                w.writerow([f"{v:.17g}" for v in row])
    _emit({"pair": label, "u": u.tolist(), "rows": len(rows), "max_residual": worst,
           "t_end": args.t_end, "step": args.step})
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nilsym", description="Symmetry analysis of 2-step nilpotent metric Lie algebras")
    p.add_argument("--version", action="version", version=f"nilsym {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="check a data set or Lie algebra document")
    v.add_argument("path")
    v.add_argument("--tol", type=float)
    v.set_defaults(func=cmd_validate)

    a = sub.add_parser("analyze", help="full analysis report")
    a.add_argument("path")
    a.add_argument("--seed", type=int, default=0)
    a.add_argument("--tol", type=float)
    a.add_argument("--pretty", action="store_true")
    a.set_defaults(func=cmd_analyze)

    g = sub.add_parser("gallery", help="list or print built-in examples")
    g.add_argument("name", nargs="?")
    g.set_defaults(func=cmd_gallery)

    f = sub.add_parser("fuzz", help="randomized theorem checks")
    f.add_argument("--count", type=int, default=10)
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--max-dim", type=int, default=16)
    f.add_argument("--tol", type=float)
    f.set_defaults(func=cmd_fuzz)

    q = sub.add_parser("geodesic", help="Killing-flow orbit through e with its geodesic residual")
    q.add_argument("path")
    q.add_argument("--pair", type=int, default=0)
    q.add_argument("--u", help="comma-separated u for an explicit (u, 0) pair instead of a transvection")
    q.add_argument("--t-end", type=float, default=1.0)
    q.add_argument("--step", type=float, default=1e-3)
    q.add_argument("--csv")
    q.add_argument("--tol", type=float)
    q.set_defaults(func=cmd_geodesic)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (SchemaError, OSError) as exc:
        print(f"nilsym: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NilsymError as exc:
        print(f"nilsym: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_MATH


if __name__ == "__main__":
    sys.exit(main())
