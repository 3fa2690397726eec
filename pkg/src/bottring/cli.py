"""Command line front end.

Exit codes: 0 success / ISO / true, 1 NON_ISO / false, 2 UNKNOWN, 64 usage,
65 rejected input (e.g. an obstructed move), 66 unreadable file,
70 internal invariant violation.
"""

import argparse
import csv
import json
import logging
import sys
import time

from . import census as census_mod
from .candidate import IsoCandidate, iso_check
from .errors import BottError
from .invariants import fingerprint, is_q_trivial, is_well_ordered, square_vanishing_set
from .isomorphism import ISO, NON_ISO, are_isomorphic
from .moves import bundle_change, replay, stage_swap
from .selfcheck import run_all
from .ring import validate

EXIT_USAGE, EXIT_NOINPUT = 64, 66
STATUS_EXIT = {ISO: 0, NON_ISO: 1}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _dump(obj):
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _read_json(path):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise FileNotFoundError(f"{path}: {exc.strerror}") from exc


def _parse_vec(text):
    text = text.strip()
    if text.startswith("["):
        return [int(x) for x in json.loads(text)]
    return [int(x) for x in text.split(",") if x.strip()]


def cmd_inv(args, out):
    M = validate(_read_json(args.matrix))
    X = square_vanishing_set(M)
    fp = fingerprint(M)
    if args.format == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["n", "t", "q_trivial", "well_ordered", "span_index", "product_divisors",
                    "mod2_square_zero_count", "fingerprint_hash"])
        w.writerow([M.n, X.t, is_q_trivial(M), is_well_ordered(M), fp.span_index,
                    " ".join(map(str, fp.product_divisors)), fp.mod2_square_zero_count, fp.digest()])
    else:
        out.write(_dump({
            "matrix": M.to_json(),
            "X": [list(z) for z in X.elements],
            "squareZeroStages": list(X.stages),
            "t": X.t,
            "qTrivial": is_q_trivial(M),
            "wellOrdered": is_well_ordered(M),
            "fingerprint": fp.to_json(),
            "fingerprintHash": fp.digest(),
        }) + "\n")
    return 0


def cmd_iso(args, out):
    A = validate(_read_json(args.a))
    B = validate(_read_json(args.b))
    v = are_isomorphic(A, B, args.bound, args.method)
    out.write(v.dumps() + "\n")
    return STATUS_EXIT.get(v.status, 2)


def cmd_move(args, out):
    M = validate(_read_json(args.matrix))
    if args.swap is not None:
        N, move = stage_swap(M, args.swap)
    else:
        if args.u is None:
            raise UsageError("--bundle needs --u")
        N, move = bundle_change(M, args.bundle, _parse_vec(args.u))
    out.write(_dump({"matrix": N.to_json(), "move": move.to_json(), "iso": move.iso.to_json()}) + "\n")
    return 0


def cmd_replay(args, out):
    obj = _read_json(args.trace)
    try:
        trace = replay(obj)
    except BottError as exc:
        out.write(_dump({"ok": False, "error": exc.code, "detail": str(exc)}) + "\n")
        return 1
    out.write(_dump({"ok": True, "steps": len(trace.steps), "iso": trace.iso().to_json()}) + "\n")
    return 0


def cmd_check_iso(args, out):
    c = IsoCandidate.from_json(_read_json(args.candidate))
    ok = iso_check(c)
    out.write(_dump({"ok": ok}) + "\n")
    return 0 if ok else 1


def cmd_census(args, out):
    cfg = census_mod.CensusConfig(
        n=args.n, c=args.c, u_bound=args.u_bound, coeff_bound=args.coeff_bound,
        node_cap=args.node_cap, workers=args.workers, method=args.method,
    )
    started = time.perf_counter()
    report = census_mod.classify(cfg)
    logging.getLogger("bottring").info("census finished in %.2fs", time.perf_counter() - started)
    if args.out:
        census_mod.write_report(report, args.out)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            census_mod.write_csv(report, fh)
    if args.format == "csv":
        census_mod.write_csv(report, out)
    elif not args.out:
        out.write(census_mod.dumps_report(report))
    else:
        out.write(_dump(report["trailer"]["stats"]) + "\n")
    return 0 if not report["trailer"]["unresolved"] else 2


def cmd_verify(args, out):
    ok = census_mod.verify_report(args.report)
    out.write(_dump({"ok": ok}) + "\n")
    return 0 if ok else 1


def cmd_selfcheck(args, out):
    results = run_all()
    width = max(len(name) for name, _, _ in results)
    for name, ok, detail in results:
        out.write(f"{name:<{width}}  {'PASS' if ok else 'FAIL'}  {detail}\n")
    return 0 if all(ok for _, ok, _ in results) else 1


def build_parser():
    p = _Parser(prog="bottring", description="Cohomology rings of Bott manifolds")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    s = sub.add_parser("inv", help="square-zero classes, flags and fingerprint")
    s.add_argument("matrix")
    s.add_argument("--format", choices=["json", "csv"], default="json")
    s.set_defaults(func=cmd_inv)

    s = sub.add_parser("iso", help="decide ring isomorphism")
    s.add_argument("a")
    s.add_argument("b")
    s.add_argument("--bound", type=int, default=3)
    s.add_argument("--method", choices=["auto", "bounded"], default="auto")
    s.set_defaults(func=cmd_iso)

    s = sub.add_parser("move", help="apply one move")
    s.add_argument("matrix")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--swap", type=int, metavar="J")
    g.add_argument("--bundle", type=int, metavar="J")
    s.add_argument("--u", help="comma-separated or JSON list")
    s.set_defaults(func=cmd_move)

    s = sub.add_parser("replay", help="re-verify a move trace")
    s.add_argument("trace")
    s.set_defaults(func=cmd_replay)

    s = sub.add_parser("check-iso", help="iso_check a serialized candidate")
    s.add_argument("candidate")
    s.set_defaults(func=cmd_check_iso)

    s = sub.add_parser("census", help="classify all towers with bounded entries")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--c", type=int, required=True)
    s.add_argument("--u-bound", type=int, default=2)
    s.add_argument("--coeff-bound", type=int, default=3)
    s.add_argument("--node-cap", type=int, default=100_000)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--method", choices=["auto", "bounded"], default="auto")
    s.add_argument("--out", help="JSONL report path")
    s.add_argument("--csv", help="CSV summary path")
    s.add_argument("--format", choices=["json", "csv"], default="json")
    s.set_defaults(func=cmd_census)

    s = sub.add_parser("verify", help="re-verify a census report")
    s.add_argument("report")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("paper-check", help="run the built-in fixture suite")
    s.set_defaults(func=cmd_selfcheck)
    return p


def _fail(code, detail, status):
    sys.stderr.write(_dump({"error": code, "detail": detail}) + "\n")
    return status


def main(argv=None, out=None):
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        return _fail("Usage", str(exc), EXIT_USAGE)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr)
    try:
        return args.func(args, out)
    except UsageError as exc:
        return _fail("Usage", str(exc), EXIT_USAGE)
    except BottError as exc:
        return _fail(exc.code, str(exc), exc.exit_code)
    except FileNotFoundError as exc:
        return _fail("NoInput", str(exc), EXIT_NOINPUT)
    except (json.JSONDecodeError, ValueError, KeyError, TypeError) as exc:
        return _fail("BadInput", f"{type(exc).__name__}: {exc}", 65)


if __name__ == "__main__":
    sys.exit(main())
