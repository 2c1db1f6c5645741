"""Command-line interface: `satocensus <subcommand> [flags]`.

Subcommands: census, classno, gekeler, ydist, zdist, metric, verify,
vertical, strong, twod, primeseq, isogeny.  Reports are printed as JSON;
tabular outputs default to CSV on stdout (--format json for JSON).
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from satocensus import experiments, metric, ydist
from satocensus.census import weighted_census, write_census_csv
from satocensus.classno import hurwitz_class_number
from satocensus.experiments import PatternConstraint
from satocensus.ydist import PrimeClass, error_term_dist, factor_law, moments


def _add_common(sub):
    sub.add_argument("--out", default=None, help="directory for artifacts")
    sub.add_argument("--seed", type=int, default=1)
    sub.add_argument("--threads", type=int, default=None)
    sub.add_argument("--format", choices=("csv", "json"), default="csv")


def _emit_report(report):
    print(report.to_json())


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="satocensus")
    subs = parser.add_subparsers(dest="command", required=True)

    s = subs.add_parser("census", help="trace census of elliptic curves over F_p")
    s.add_argument("--p", type=int, required=True)
    _add_common(s)

    s = subs.add_parser("classno", help="Hurwitz class number H(delta)")
    s.add_argument("--delta", type=int, required=True)

    s = subs.add_parser("gekeler", help="truncated-product estimates per trace")
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--l0", type=int, required=True)
    s.add_argument("--k", type=int, default=None)
    s.add_argument("--count", type=int, default=0, help="sample size (0 = all traces)")
    _add_common(s)

    s = subs.add_parser("ydist", help="local factor law at a prime l")
    s.add_argument("--l", type=int, required=True)
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--depth", type=int, default=8)
    _add_common(s)

    s = subs.add_parser("zdist", help="truncated error-term distribution")
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--l1", type=int, default=20)
    s.add_argument("--k", type=int, default=3)
    s.add_argument("--prune", type=float, default=1e-9)
    _add_common(s)

    s = subs.add_parser("metric", help="distances between two point clouds")
    s.add_argument("mu", help="CSV with columns x[,y],mass")
    s.add_argument("nu")
    _add_common(s)

    s = subs.add_parser("verify", help="census vs class-number identity check")
    s.add_argument("--pmin", type=int, default=5)
    s.add_argument("--pmax", type=int, default=199)
    _add_common(s)

    s = subs.add_parser("vertical", help="constant-bin semicircle histogram")
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--bins", type=int, default=50)
    _add_common(s)

    s = subs.add_parser("strong", help="windowed semicircle histogram, width p^alpha")
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--alpha", type=float, default=0.2)
    s.add_argument("--sliding", action="store_true")
    _add_common(s)

    s = subs.add_parser("twod", help="2D trace/count cloud vs heuristic model")
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--l1", type=int, default=20)
    s.add_argument("--k", type=int, default=3)
    s.add_argument("--samples", type=int, default=40_000)
    _add_common(s)

    s = subs.add_parser("primeseq", help="error-term laws along prime patterns")
    s.add_argument("--count", type=int, default=3)
    s.add_argument("--l1", type=int, default=5)
    s.add_argument("--k", type=int, default=2)
    s.add_argument("--start", type=int, default=3)
    s.add_argument(
        "--symbol", action="append", default=[],
        help="l=e constraint, e.g. --symbol 3=1 (repeatable)",
    )
    s.add_argument("--mod8", choices=("1mod8", "3mod4", "5mod8"), default=None)
    _add_common(s)

    s = subs.add_parser("isogeny", help="normalized trace-class size distribution")
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--unweighted", action="store_true")
    _add_common(s)

    args = parser.parse_args(argv)
    return _dispatch(args)


def _dispatch(args) -> int:
    cmd = args.command

    if cmd == "census":
        census = weighted_census(args.p, threads=args.threads)
        if args.out:
            from pathlib import Path

            path = Path(args.out) / f"census_{args.p}.csv"
            Path(args.out).mkdir(parents=True, exist_ok=True)
            write_census_csv(census, path)
            print(path)
        elif args.format == "json":
            print(json.dumps({
                str(t): [census.weighted[t].numerator, census.weighted[t].denominator,
                         census.unweighted[t]]
                for t in census.traces()
            }))
        else:
            print(",".join(["t", "weighted_num", "weighted_den", "unweighted"]))
            for t in census.traces():
                w = census.weighted[t]
                print(f"{t},{w.numerator},{w.denominator},{census.unweighted[t]}")
        return 0

    if cmd == "classno":
        h = hurwitz_class_number(args.delta)
        print(f"{h.numerator}/{h.denominator}")
        return 0

    if cmd == "gekeler":
        h = math.isqrt(4 * args.p)
        if args.count:
            rng = np.random.default_rng(np.random.SeedSequence(args.seed))
            traces = sorted(
                int(t) for t in rng.choice(2 * h + 1, size=args.count, replace=False) - h
            )
        else:
            traces = range(-h, h + 1)
        rows = experiments.gekeler_trace_rows(args.p, args.l0, traces, k=args.k)
        print("t,delta,exact_num,exact_den,estimate,rel_error")
        for t, delta, num, den, est, rel in rows:
            print(f"{t},{delta},{num},{den},{est!r},{rel!r}")
        return 0

    if cmd == "ydist":
        law = factor_law(args.l, PrimeClass.from_prime(args.l, args.p), args.depth)
        print("value_num,value_den,mass_num,mass_den")
        for v, m in law.atoms:
            print(f"{v.numerator},{v.denominator},{m.numerator},{m.denominator}")
        if law.tail_mass:
            tv, tm = law.tail_value, law.tail_mass
            print(f"# tail at {tv.numerator}/{tv.denominator}: "
                  f"{tm.numerator}/{tm.denominator}")
        return 0

    if cmd == "zdist":
        dist = error_term_dist(args.p, args.l1, args.k, prune_eps=args.prune)
        mean, var = moments(dist)
        summary = {
            "p": args.p, "l1": args.l1, "k": args.k,
            "support": dist.support_size(),
            "mean": str(mean), "variance": str(var),
            "pruned_mass": float(dist.pruned_mass),
        }
        print("value_num,value_den,mass_num,mass_den")
        for v, m in dist.atoms:
            print(f"{v.numerator},{v.denominator},{m.numerator},{m.denominator}")
        print("# " + json.dumps(summary, sort_keys=True))
        return 0

    if cmd == "metric":
        mu = metric.read_cloud_csv(args.mu)
        nu = metric.read_cloud_csv(args.nu)
        out = {"w1": metric.wasserstein1(mu, nu), "upper": metric.prokhorov_upper(mu, nu)}
        if mu.n + nu.n <= metric.PROKHOROV_SUPPORT_CAP:
            out["exact"] = metric.prokhorov_exact(mu, nu)
        print(json.dumps(out, sort_keys=True))
        return 0

    if cmd == "verify":
        report = experiments.cmd_gekeler_verify(
            args.pmin, args.pmax, out_dir=args.out, threads=args.threads
        )
        _emit_report(report)
        return 0 if not report.stats["mismatches"] else 1

    if cmd == "vertical":
        _emit_report(experiments.cmd_vertical_st(
            args.p, args.bins, out_dir=args.out, threads=args.threads))
        return 0

    if cmd == "strong":
        _emit_report(experiments.cmd_strong_st(
            args.p, args.alpha, sliding=args.sliding,
            out_dir=args.out, threads=args.threads))
        return 0

    if cmd == "twod":
        _emit_report(experiments.cmd_2dst(
            args.p, l1=args.l1, k=args.k, n_samples=args.samples,
            seed=args.seed, out_dir=args.out, threads=args.threads))
        return 0

    if cmd == "primeseq":
        symbols = []
        for spec in args.symbol:
            l, e = spec.split("=")
            symbols.append((int(l), int(e)))
        constraint = PatternConstraint(tuple(symbols), args.mod8)
        _emit_report(experiments.cmd_prime_seq(
            constraint, count=args.count, l1=args.l1, k=args.k,
            start=args.start, out_dir=args.out))
        return 0

    if cmd == "isogeny":
        _emit_report(experiments.cmd_isogeny_dist(
            args.p, weighted=not args.unweighted, seed=args.seed,
            out_dir=args.out, threads=args.threads))
        return 0

    raise AssertionError(f"unhandled command {cmd}")


if __name__ == "__main__":
    sys.exit(main())
