"""Command-line front end.

Exit codes: 0 when every check passes, 2 when a check finds a
counterexample (the report still gets written), 1 on usage or input errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import secrets
import sys
from datetime import datetime, timezone
from pathlib import Path

from . import boolfn, bridge, cube, spectral
from .errors import CounterexampleFound, CubeSenseError

SCHEMA = 1
OUT_DIR_ENV = "CUBESENSE_OUT_DIR"
WALL_CLOCK_FIELDS = ("generated_at",)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_COUNTEREXAMPLE = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common(p, randomized=False):
    p.add_argument("--n", type=int, required=True, help="dimension / number of variables")
    p.add_argument("--tol", type=float, default=None, help="numerical tolerance (echoed in the report)")
    p.add_argument("--out", type=Path, default=None, help=f"report path (default: ${OUT_DIR_ENV}/<name>.json)")
    p.add_argument("--format", choices=("json", "csv", "human"), default="json")
    if randomized:
        p.add_argument("--mode", choices=("exhaustive", "random"), default="exhaustive")
        p.add_argument("--trials", type=int, default=1000)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--ephemeral", action="store_true",
                       help="allow randomized runs without --seed (a fresh seed is drawn and recorded)")
        p.add_argument("--jobs", type=int, default=1, help="worker processes for sampled checks")


def build_parser():
    parser = _Parser(prog="cubesense", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("measures", help="sensitivity, block sensitivity and degree of a truth table")
    p.add_argument("table", help="truth table as lowercase hex, bit x = f(x)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--format", choices=("json", "csv", "human"), default="json")
    p.add_argument("--out", type=Path, default=None)

    p = sub.add_parser("verify", help="run a verification pipeline")
    p.add_argument("target", choices=("an", "theorem1", "gl", "sdeg", "bschain"))
    _common(p, randomized=True)
    p.add_argument("--matrix", type=Path, default=None,
                   help="for 'an': check this matrix dump instead of the built A_n")
    p.add_argument("--certify", action="store_true",
                   help="for 'theorem1 --mode random': also compute spectral certificates")

    p = sub.add_parser("witness", help="emit a named vertex-set construction")
    p.add_argument("kind", choices=("star", "tight", "gl-side"))
    _common(p)
    p.add_argument("--table", default=None, help="for 'gl-side': truth table hex (default AND-of-ORs)")

    p = sub.add_parser("explore-g", help="bounds on g(n, k)")
    _common(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--budget", type=int, default=20000)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--ephemeral", action="store_true")

    p = sub.add_parser("dump-an", help="write A_n in the matrix dump format")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--out", type=Path, default=None)

    p = sub.add_parser("spectrum", help="eigenvalues of A_n (or a matrix dump) as JSON")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--matrix", type=Path, default=None)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--out", type=Path, default=None)
    return parser


def _resolve_seed(args, needed):
    if not needed:
        return getattr(args, "seed", None)
    if args.seed is not None:
        return args.seed
    if getattr(args, "ephemeral", False):
        return secrets.randbits(32)
    raise UsageError("randomized runs need --seed (or --ephemeral to draw one)")


def _verify(args):
    n, target = args.n, args.target
    randomized = (args.mode == "random" and target in ("theorem1", "gl")) or (
        target in ("sdeg", "bschain") and n > boolfn.MAX_SWEEP_VARS
    )
    seed = _resolve_seed(args, randomized)
    tol = args.tol
    config = {"target": target, "n": n, "seed": seed, "tol": tol}
    if target in ("theorem1", "gl"):
        config.update(mode=args.mode, trials=args.trials if args.mode == "random" else None)
    if target == "an":
        if args.matrix is not None:
            A = spectral.load_matrix(args.matrix.read_text())
            config["matrix"] = str(args.matrix)
        else:
            A = spectral.build_an(n)
        cert = spectral.verify_square_identity(A, n)
        result = cert.to_dict()
        result["failures"] = [] if cert.holds else [{"first_bad_entry": result["first_bad_entry"]}]
        return config, result, cert.holds
    try:
        if target == "theorem1":
            certify = args.certify and args.mode == "random"
            rep = cube.verify_theorem1(n, args.mode, args.trials, seed, certify=certify,
                                       tol=1e-6 if tol is None else tol, jobs=args.jobs, strict=True)
        elif target == "gl":
            rep = bridge.verify_gl(n, args.mode, args.trials, seed, strict=True)
        elif target == "sdeg":
            rep = bridge.verify_sensitivity_degree(n, trials=args.trials, seed=seed, strict=True)
        else:
            rep = bridge.verify_bs_chain(n, trials=args.trials, seed=seed, strict=True)
    except CounterexampleFound as exc:
        return config, exc.report.to_dict() if exc.report is not None else {"failures": [str(exc)]}, False
    return config, rep.to_dict(), True


def _witness(args):
    n, kind = args.n, args.kind
    tol = spectral.DEFAULT_TOL if args.tol is None else args.tol
    config = {"kind": kind, "n": n, "tol": tol, "seed": None}
    if kind == "star":
        H = cube.star_plus_isolated(n)
    elif kind == "tight":
        H = cube.find_tight_witness(n)
    else:
        if args.table is not None:
            f = boolfn.TruthTable.from_hex(args.table, n)
        else:
            root = math.isqrt(n)
            if root * root != n:
                raise UsageError("gl-side without --table needs a perfect-square n (AND-of-ORs)")
            f = boolfn.and_of_ors(root)
        inst = bridge.gl_map(f)
        H = inst.h_set
        config["table"] = f.to_hex()
    degrees = cube.induced_degrees(H)
    result = {**H.to_dict(), **degrees.to_dict()}
    size = H.cardinality()
    if n >= 1 and size == (1 << (n - 1)) + 1:
        result["lambda_signed"] = cube.spectral_certificate(H, tol=tol)
    if size and size <= spectral.MAX_DENSE_DIM:
        adj = cube.induced_adjacency(H)
        result["lambda_induced"] = float(spectral.lambda_max(adj.astype(float), tol=tol))
    return config, result, True


def _explore(args):
    seed = _resolve_seed(args, args.n > cube.MAX_EXACT_G_DIM)
    bounds = cube.explore_g(args.n, args.k, budget=args.budget, seed=seed)
    config = {"n": args.n, "k": args.k, "budget": args.budget, "seed": seed, "tol": args.tol}
    return config, bounds.to_dict(), True


def _measures(args):
    f = boolfn.TruthTable.from_hex(args.table, args.n)
    report = boolfn.measures(f)
    return {"table": f.to_hex(), "n": f.n, "seed": None, "tol": None}, report.to_dict(), True


def _flatten(report):
    return {k: v for k, v in report.items() if not isinstance(v, (list, dict))}


def render(report, fmt):
    if fmt == "json":
        return json.dumps(report, indent=2, sort_keys=True) + "\n"
    if fmt == "csv":
        flat = _flatten(report)
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(flat), lineterminator="\n")
        writer.writeheader()
        writer.writerow(flat)
        return buf.getvalue()
    lines = []
    for key, value in report.items():
        if isinstance(value, (list, dict)):
            value = json.dumps(value)
        lines.append(f"{key}: {value}")
    return "\n".join(lines) + "\n"


def _default_out(name):
    root = os.environ.get(OUT_DIR_ENV)
    return Path(root) / f"{name}.json" if root else None


def _emit(args, name, report):
    text = render(report, args.format)
    sys.stdout.write(text)
    out = args.out or _default_out(name)
    if out is not None:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(render(report, "json") if out.suffix == ".json" else text)


def run(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "dump-an":
            text = spectral.dump_matrix(spectral.build_an(args.n))
            if args.out:
                args.out.write_text(text)
            else:
                sys.stdout.write(text)
            return EXIT_OK
        if args.command == "spectrum":
            if (args.n is None) == (args.matrix is None):
                raise UsageError("spectrum takes exactly one of --n or --matrix")
            A = spectral.load_matrix(args.matrix.read_text()) if args.matrix else spectral.build_an(args.n)
            text = spectral.full_spectrum(A, tol=args.tol).to_json() + "\n"
            if args.out:
                args.out.write_text(text)
            else:
                sys.stdout.write(text)
            return EXIT_OK
        handler, name = {
            "measures": (_measures, "measures"),
            "verify": (_verify, f"verify-{getattr(args, 'target', '')}-n{args.n}"),
            "witness": (_witness, f"witness-{getattr(args, 'kind', '')}-n{args.n}"),
            "explore-g": (_explore, f"explore-g-n{args.n}-k{getattr(args, 'k', '')}"),
        }[args.command]
        config, result, passed = handler(args)
    except (UsageError, CubeSenseError, OSError) as exc:
        print(f"cubesense: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    report = {"schema": SCHEMA, "command": args.command, **config, **result, "passed": passed,
              "generated_at": datetime.now(timezone.utc).isoformat(timespec="seconds")}
    _emit(args, name, report)
    return EXIT_OK if passed else EXIT_COUNTEREXAMPLE


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
