"""``twoview`` command line: generate, run, report, bench.

Exit codes: 0 success, 2 bad flags, 3 IO error, 4 unknown method.
"""
from __future__ import annotations

import argparse
import hashlib
import logging
import sys

import numpy as np

from . import fileio, report
from .bench import benchmark_batch, time_methods
from .run import METHODS, UnknownMethod, parse_methods, run_methods
from .synthgen import CONFIGS, DEFAULT_D, DEFAULT_SIGMA, UnknownConfig, build_dataset, grid

log = logging.getLogger("twoview")

EXIT_OK, EXIT_FLAGS, EXIT_IO, EXIT_METHOD = 0, 2, 3, 4
# Flags whose values may legitimately start with '-'.
_VALUE_FLAGS = ("--d-exponents", "--d", "--sigma", "--bins")


class FlagError(ValueError):
    pass


def parse_values(text: str, cast=float) -> list:
    """``"1..8"`` (inclusive integer range), ``"1,2,4"`` or a single value."""
    text = text.strip()
    try:
        if ".." in text:
            lo, hi = text.split("..")
            return [cast(v) for v in range(int(lo), int(hi) + 1)]
        return [cast(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise FlagError(f"cannot parse value list {text!r}") from exc


def _configs(text):
    if text == "all":
        return list(CONFIGS)
    names = [c.strip() for c in text.split(",") if c.strip()]
    for c in names:
        if c not in CONFIGS:
            raise FlagError(f"unknown config {c!r}; choose from all,{','.join(CONFIGS)}")
    return names


def cmd_generate(args) -> int:
    if args.d is not None and args.d_exponents is not None:
        raise FlagError("use either --d or --d-exponents, not both")
    if args.d is not None:
        ds_values = parse_values(args.d)
    elif args.d_exponents is not None:
        ds_values = [2.0**n for n in parse_values(args.d_exponents, int)]
    else:
        ds_values = list(DEFAULT_D)
    sigmas = parse_values(args.sigma) if args.sigma is not None else list(DEFAULT_SIGMA)
    if any(d <= 0 for d in ds_values) or any(s < 0 for s in sigmas) or args.points < 0:
        raise FlagError("d must be positive, sigma and points non-negative")
    cells = grid(_configs(args.config), ds_values, sigmas, n_points=args.points, seed=args.seed,
                 image_size=args.image_size, focal=args.focal)
    ds = build_dataset(cells, workers=args.workers)
    fileio.write_dataset(args.out, ds)
    log.info("wrote %d problems (%d rejected for visibility) to %s", len(ds), ds.rejected, args.out)
    return EXIT_OK


def cmd_run(args) -> int:
    methods = parse_methods(args.methods)
    ds = fileio.read_dataset(args.inp)
    cols = run_methods(ds, methods, workers=args.workers)
    fileio.write_results(args.out, cols)
    log.info("wrote %d result rows to %s", len(cols["id"]), args.out)
    return EXIT_OK


def cmd_report(args) -> int:
    bins = parse_values(args.bins)
    if len(bins) < 2 or any(b >= c for b, c in zip(bins, bins[1:])):
        raise FlagError("--bins needs at least two increasing edges")
    cols = fileio.read_results(args.inp)
    rows = report.aggregate(cols, bins, args.norm)
    header = report.report_header(args.norm)
    if args.out == "-":
        import csv

        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(header)
        w.writerows([[fileio.fmt(v) if isinstance(v, float) else v for v in r] for r in rows])
    else:
        fileio.write_csv(args.out, header, rows)
    return EXIT_OK


def cmd_bench(args) -> int:
    methods = parse_methods(args.methods)
    batch = benchmark_batch(args.points, seed=args.seed)
    rows = time_methods(batch, methods, repetitions=args.repetitions)
    header = ["method", "points_per_second", "batch_size", "repetitions", "seconds_median"]
    table = [[r.method, r.points_per_second, r.batch_size, r.repetitions, r.seconds_median] for r in rows]
    if args.out:
        fileio.write_csv(args.out, header, table)
    for r in rows:
        print(f"{r.method:>6}  {r.points_per_second:14,.0f} points/s  (median of {r.repetitions}, "
              f"batch {r.batch_size})")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="twoview", description="Two-view triangulation benchmark")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a synthetic dataset")
    g.add_argument("--config", default="all", help="all or comma list of " + ",".join(CONFIGS))
    g.add_argument("--d", help="cloud distances, e.g. 4 or 0.5,4")
    g.add_argument("--d-exponents", help="d = 2**n for n in e.g. -1..6")
    g.add_argument("--sigma", help="pixel noise levels, e.g. 1..8 or 2")
    g.add_argument("--points", type=int, default=200, help="points per cloud")
    g.add_argument("--seed", type=int, default=42)
    g.add_argument("--image-size", type=int, default=1024)
    g.add_argument("--focal", type=float, default=512.0)
    g.add_argument("--workers", type=int, default=1)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_generate)

    r = sub.add_parser("run", help="triangulate every problem with each method")
    r.add_argument("--in", dest="inp", required=True)
    r.add_argument("--out", required=True)
    r.add_argument("--methods", default=",".join(METHODS))
    r.add_argument("--workers", type=int, default=1)
    r.set_defaults(func=cmd_run)

    a = sub.add_parser("report", help="aggregate a results file")
    a.add_argument("--in", dest="inp", required=True)
    a.add_argument("--out", default="-")
    a.add_argument("--bins", default=",".join(str(b) for b in report.DEFAULT_BINS_DEG),
                   help="raw-parallax bin edges in degrees")
    a.add_argument("--norm", choices=sorted(report.NORM_FIELDS), help="report only this 2D norm")
    a.set_defaults(func=cmd_report)

    b = sub.add_parser("bench", help="time the kernels")
    b.add_argument("--methods", default=",".join(METHODS))
    b.add_argument("--points", type=int, default=1_000_000, help="batch size")
    b.add_argument("--repetitions", type=int, default=3)
    b.add_argument("--seed", type=int, default=42)
    b.add_argument("--out")
    b.set_defaults(func=cmd_bench)
    return p


def _join_values(argv):
    out, it = [], iter(argv)
    for a in it:
        if a in _VALUE_FLAGS:
            nxt = next(it, None)
            out.append(a if nxt is None else f"{a}={nxt}")
        else:
            out.append(a)
    return out


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(_join_values(sys.argv[1:] if argv is None else list(argv)))
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UnknownMethod as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_METHOD
    except (FlagError, UnknownConfig) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FLAGS
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


def digest(path) -> str:
    """SHA-256 of a file, used to compare generated artefacts."""
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


if __name__ == "__main__":
    sys.exit(main())
