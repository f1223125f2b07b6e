"""Command-line front end. Every subcommand prints one JSON envelope by default."""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import __version__
from .anomalous import (
    VERIFY_BOUND,
    anomalous_square_certificate,
    count_anomalous_primes,
    find_anomalous_D,
    pell_sequence,
)
from .curves import CurveParams, count_points, order_candidates, trace, twist_spectrum
from .experiments import PUBLISHED_SEED, PUBLISHED_TABLE, Weighting, odc_table
from .korselt import (
    elliptic_pseudoprime_check,
    gen_silv_classify,
    korselt_search,
    korselt_type1_check,
    sample_point,
)
from .numtheory import hex_form, is_prime, primes_upto

_WEIGHTING = {"pairs": Weighting.PAIR_UNIFORM, "exact": Weighting.CURVE_EXACT}


def _log(msg: str) -> None:
    print(msg, file=sys.stderr, flush=True)


def _curve(args, modulus=None) -> CurveParams:
    return CurveParams(max(modulus or args.n or 5, 5), args.c, args.d)


# --- handlers: each returns (parameters, result[, csv text]) ------------------------

def cmd_trace(args):
    return {"p": args.p, "c": args.c, "d": args.d}, {"trace": trace(args.p, args.c, args.d)}


def cmd_order(args):
    return {"p": args.p, "c": args.c, "d": args.d}, {"order": count_points(args.p, args.c, args.d)}


def cmd_twists(args):
    return {"p": args.p, "d": args.d}, twist_spectrum(args.p, args.d).as_record()


def cmd_candidates(args):
    return {"p": args.p}, {"orders": sorted(order_candidates(args.p))}


def cmd_anomalous_find_d(args):
    return {"p": args.p}, {"p": args.p, "D": find_anomalous_D(args.p)}


def cmd_anomalous_primes(args):
    rows = []
    for p in primes_upto(args.bound):
        p = int(p)
        if p < 5 or hex_form(p) is None:
            continue
        rows.append({"p": p, "n": hex_form(p), "D": find_anomalous_D(p) if p <= VERIFY_BOUND else None})
    return {"bound": args.bound}, {"primes": rows}


def cmd_anomalous_squares(args):
    certs = []
    for entry in pell_sequence(args.count):
        if is_prime(entry.p):
            certs.append(anomalous_square_certificate(entry.p, oracle=not args.no_oracle).as_record())
    return {"count": args.count}, {"certificates": certs}


def cmd_pell(args):
    rows = [vars(e).copy() for e in pell_sequence(args.count)]
    return {"count": args.count}, {"entries": rows}


def cmd_korselt_check(args):
    return {"n": args.n, "c": args.c, "d": args.d}, korselt_type1_check(_curve(args), args.n).as_record()


def cmd_korselt_search(args):
    curve = CurveParams(5, args.c, args.d)
    # The outer loop runs over p < sqrt(bound).
    every = max(math.isqrt(args.bound) // 10, 1)
    state = {"next": every}

    def progress(p):
        if p >= state["next"]:
            _log(f"korselt search: p = {p}")
            state["next"] += every

    pairs = korselt_search(curve, args.bound, progress=progress)
    return {"bound": args.bound, "c": args.c, "d": args.d}, {"pairs": [list(x) for x in pairs]}


def cmd_classify(args):
    labels = sorted(gen_silv_classify(_curve(args), args.n))
    return {"n": args.n, "c": args.c, "d": args.d}, {"labels": labels}


def cmd_pseudoprime(args):
    curve = _curve(args)
    rng = np.random.default_rng(args.seed)
    rows = []
    for _ in range(args.points):
        P = sample_point(curve, args.n, rng)
        out = elliptic_pseudoprime_check(curve, args.n, P)
        rows.append({"x": P[0], "y": P[1], "pseudoprime": bool(out)})
    params = {"n": args.n, "c": args.c, "d": args.d, "seed": args.seed, "points": args.points}
    return params, {"checks": rows, "all": all(r["pseudoprime"] for r in rows)}


def cmd_experiment_odc(args):
    Ns = args.N or sorted(PUBLISHED_TABLE)
    weighting = _WEIGHTING[args.weighting]
    table = odc_table(Ns, args.trials, args.seed, weighting,
                      progress=lambda r: _log(f"odc: N = {r.N} estimate = {r.estimate:.3f}"))
    params = {"N": Ns, "trials": args.trials, "seed": args.seed, "weighting": weighting.value}
    return params, {"rows": table.records()}, table.to_csv()


def cmd_density(args):
    count, c = count_anomalous_primes(args.d, args.bound)
    return {"d": args.d, "bound": args.bound}, {"count": count, "c_estimate": c}


# --- parser ------------------------------------------------------------------------

def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("json", "csv", "text"), default="json")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bachet", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def leaf(container, name, func, help_):
        p = container.add_parser(name, help=help_)
        _common(p)
        p.set_defaults(func=func, command_name=name)
        return p

    def curve_flags(p, n=False):
        if n:
            p.add_argument("--n", type=int, required=True)
        p.add_argument("--c", type=int, default=0)
        p.add_argument("--d", type=int, default=1)

    p = leaf(sub, "trace", cmd_trace, "trace of Frobenius at p")
    p.add_argument("--p", type=int, required=True)
    curve_flags(p)
    p = leaf(sub, "order", cmd_order, "#E(F_p)")
    p.add_argument("--p", type=int, required=True)
    curve_flags(p)
    p = leaf(sub, "twists", cmd_twists, "six sextic-twist traces")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--d", type=int, default=1)
    p = leaf(sub, "candidates", cmd_candidates, "possible Bachet orders over F_p")
    p.add_argument("--p", type=int, required=True)

    anom = sub.add_parser("anomalous", help="Bachet anomalous primes and squares")
    anom_sub = anom.add_subparsers(dest="anomalous_command", required=True)
    p = leaf(anom_sub, "find-d", cmd_anomalous_find_d, "smallest D with #E(F_p) = p")
    p.add_argument("--p", type=int, required=True)
    p = leaf(anom_sub, "primes", cmd_anomalous_primes, "hex-form primes up to a bound")
    p.add_argument("--bound", "--limit", dest="bound", type=int, default=1000)
    p = leaf(anom_sub, "squares", cmd_anomalous_squares, "certificates for prime Pell entries")
    p.add_argument("--count", "--limit", dest="count", type=int, default=8)
    p.add_argument("--no-oracle", action="store_true")

    p = leaf(sub, "pell", cmd_pell, "solutions of p^2 = 3n^2 + 3n + 1")
    p.add_argument("--count", "--limit", dest="count", type=int, default=8)

    kor = sub.add_parser("korselt", help="Type I elliptic Korselt numbers")
    kor_sub = kor.add_subparsers(dest="korselt_command", required=True)
    p = leaf(kor_sub, "check", cmd_korselt_check, "full Type I check with per-prime breakdown")
    curve_flags(p, n=True)
    p = leaf(kor_sub, "search", cmd_korselt_search, "semiprime Korselt numbers up to a bound")
    p.add_argument("--bound", "--limit", dest="bound", type=int, default=200000)
    curve_flags(p)

    p = leaf(sub, "classify", cmd_classify, "which of C1, C2, C3 hold")
    curve_flags(p, n=True)
    p = leaf(sub, "pseudoprime", cmd_pseudoprime, "spot-check (n + 1 - a_n) P = 0 mod n")
    curve_flags(p, n=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--points", type=int, default=10)

    exp = sub.add_parser("experiment", help="Monte-Carlo experiments")
    exp_sub = exp.add_subparsers(dest="experiment_command", required=True)
    p = leaf(exp_sub, "odc", cmd_experiment_odc, "Pr(N) table")
    p.add_argument("--N", type=int, action="append", help="repeatable; default: the published Ns")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=PUBLISHED_SEED)
    p.add_argument("--weighting", choices=sorted(_WEIGHTING), default="pairs")

    p = leaf(sub, "density", cmd_density, "anomalous-prime count and c estimate")
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--bound", "--limit", dest="bound", type=int, default=10000)
    return parser


def _command_path(args) -> str:
    parts = [args.command]
    for attr in ("anomalous_command", "korselt_command", "experiment_command"):
        if getattr(args, attr, None):
            parts.append(getattr(args, attr))
    return " ".join(parts)


def _csv_rows(result: dict) -> list:
    # A result that is nothing but a list of records becomes one CSV row per record.
    if len(result) == 1:
        (v,) = result.values()
        if isinstance(v, list) and v and all(isinstance(r, dict) for r in v):
            return v
    return [result]


def _cell(v):
    return json.dumps(v, sort_keys=True) if isinstance(v, (dict, list)) else ("" if v is None else v)


def render(envelope: dict, fmt: str, csv_text=None) -> str:
    result = envelope["result"]
    if fmt == "json":
        return json.dumps(envelope, sort_keys=True, indent=2) + "\n"
    if fmt == "csv":
        if csv_text is not None:
            return csv_text
        rows = _csv_rows(result)
        keys = sorted({k for r in rows for k in r})
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: _cell(r.get(k)) for k in keys})
        return buf.getvalue()
    lines = [f"{envelope['command']}:"]
    for k, v in result.items():
        lines.append(f"  {k}: {v}")
    return "\n".join(lines) + "\n"


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        params, result, *extra = args.func(args)
    except (ValueError, ArithmeticError) as exc:
        _log(f"error: {exc}")
        return 1
    envelope = {
        "artifact_version": __version__,
        "command": _command_path(args),
        "parameters": params,
        "result": result,
    }
    sys.stdout.write(render(envelope, args.format, *extra))
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
