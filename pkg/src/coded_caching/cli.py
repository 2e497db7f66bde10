"""
Command-line front end.

    coded-caching simulate --scheme proposed -N 2 -K 5 -M 4/5 -F 1000 --demands 1,1,1,2,2
    coded-caching simulate --mode decentralized -N 4 -K 8 -M 1.2 -F 100000
    coded-caching tradeoff -N 2 -K 10 --out curves.csv
    coded-caching certify -N 2 -K 5
    coded-caching verify --quick

Exit codes: 0 success, 1 verification or decode failure, 2 invalid configuration.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

from . import analytics
from .bounds import bound_report, certify_optimality_n2, lp_bound
from .combinatorics import as_fraction
from .errors import CachingError, CertificationFailed, DecodeFailure
from .gf import GF
from .model import demands as make_demands
from .model import make_instance
from .simulation import simulate
from .verify import run_all

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _write(text: str, path: str | None) -> None:
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# -- tradeoff --------------------------------------------------------------


def tradeoff_rows(N: int, K: int, density: int = 20) -> list[tuple[str, Fraction, float, bool]]:
    """(scheme, M, load, exact) rows for every curve, sorted by scheme then M."""
    grid = analytics.memory_grid(N, K, density)
    prop = analytics.centralized_curve(N, K)
    rco = analytics.rco_curve(N, K)
    mns = analytics.mns_centralized(N, K)
    rows = []
    for M in grid:
        rows.append(("proposed_centralized", M, prop(M), True))
        rows.append(("rco_centralized", M, rco(M), True))
        rows.append(("mns_centralized", M, mns(M), True))
        rows.append(("proposed_decentralized", M, analytics.r_d(N, K, M, exact=True), True))
        rows.append(("mns_decentralized", M, analytics.mns_decentralized(N, K, M, exact=True), True))
        rows.append(("outer_bound", M, lp_bound(N, K, M).value, True))
    return sorted(rows, key=lambda r: (r[0], r[1]))


def tradeoff_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["scheme", "M_num", "M_den", "load", "exact"])
    for scheme, M, load, exact in rows:
        w.writerow([scheme, M.numerator, M.denominator, f"{float(load):.12f}", str(exact).lower()])
    return buf.getvalue()


def tradeoff_json(N: int, K: int, rows) -> str:
    curves: dict[str, list] = {}
    for scheme, M, load, exact in rows:
        curves.setdefault(scheme, []).append({"M": f"{M.numerator}/{M.denominator}", "load": float(load), "exact": exact})
    return json.dumps({"N": N, "K": K, "curves": curves}, indent=2) + "\n"


# -- commands --------------------------------------------------------------


def cmd_simulate(args) -> int:
    mode = args.mode
    inst = make_instance(args.N, args.K, args.M, args.F, mode=mode)
    d = make_demands([int(x) for x in args.demands.split(",")], inst.N, inst.K) if args.demands else None
    try:
        rep = simulate(inst, mode=mode, scheme=args.scheme, demands=d, seed=args.seed, gf=GF(args.field))
    except DecodeFailure as exc:
        print(json.dumps({"success": False, "error": str(exc)}), file=sys.stderr)
        return EXIT_FAIL
    out = rep.to_dict()
    if args.transcript:
        out["transcript"] = rep.message.transcript()
    _write(json.dumps(out, indent=2) + "\n", args.out)
    if not rep.success or rep.exact_match is False:
        return EXIT_FAIL
    return EXIT_OK


def cmd_tradeoff(args) -> int:
    if not 1 <= args.N < args.K:
        raise ValueError(f"need N < K, got N={args.N}, K={args.K}")
    rows = tradeoff_rows(args.N, args.K, args.grid)
    text = tradeoff_csv(rows) if args.format == "csv" else tradeoff_json(args.N, args.K, rows)
    _write(text, args.out)
    return EXIT_OK


def cmd_certify(args) -> int:
    if not 1 <= args.N < args.K:
        raise ValueError(f"need N < K, got N={args.N}, K={args.K}")
    if args.N == 2:
        try:
            report = certify_optimality_n2(args.K, args.intermediate)
        except CertificationFailed as exc:
            _write(json.dumps({"K": args.K, "N": 2, "certified": False, "counterexample": exc.point}, indent=2) + "\n", args.out)
            return EXIT_FAIL
        body = report.to_dict()
    else:
        body = bound_report(args.N, args.K, args.intermediate).to_dict()
        body["certified"] = False
        body["claim"] = "bound-only"
    _write(json.dumps(body, indent=2) + "\n", args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    results = run_all(args.trials, args.quick)
    width = max(len(r.name) for r in results)
    lines = [f"{r.name:<{width}}  {'PASS' if r.passed else 'FAIL'}  {r.detail}" for r in results]
    _write("\n".join(lines) + "\n", args.out)
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


# -- parser ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="coded-caching", description=__doc__.splitlines()[1])
    sub = p.add_subparsers(dest="command", required=True)

    def instance_args(sp, need_mf=True):
        sp.add_argument("-N", type=int, required=True, help="number of files")
        sp.add_argument("-K", type=int, required=True, help="number of users")
        if need_mf:
            sp.add_argument("-M", type=as_fraction, required=True, help='cache size in files, e.g. "4/5" or 1.2')
            sp.add_argument("-F", type=int, required=True, help="file length")
        sp.add_argument("--out", help="output path (default stdout)")

    s = sub.add_parser("simulate", help="placement, delivery and decoding at every user")
    instance_args(s)
    s.add_argument("--mode", choices=["centralized", "decentralized"], default="centralized")
    s.add_argument("--scheme", choices=["proposed", "mns"], default="proposed")
    s.add_argument("--demands", help="comma-separated file index per user (default: worst case)")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--field", type=int, choices=[8, 16], default=8, help="GF(2^w) word size")
    s.add_argument("--transcript", action="store_true", help="include the transmission transcript")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("tradeoff", help="memory-load curves")
    instance_args(s, need_mf=False)
    s.add_argument("--format", choices=["csv", "json"], default="csv")
    s.add_argument("--grid", type=int, default=20, help="uniform grid points on [0, N]")
    s.set_defaults(func=cmd_tradeoff)

    s = sub.add_parser("certify", help="outer bound and optimality certificate")
    instance_args(s, need_mf=False)
    s.add_argument("--intermediate", type=int, default=50, help="intermediate memory points")
    s.set_defaults(func=cmd_certify)

    s = sub.add_parser("verify", help="identity suite and decode battery")
    s.add_argument("--trials", type=int, default=200)
    s.add_argument("--quick", action="store_true")
    s.add_argument("--out")
    s.set_defaults(func=cmd_verify)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (DecodeFailure, CertificationFailed) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (CachingError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
