"""Command-line entry point: ``sasample {sample,gof,bench,pf}``."""

from __future__ import annotations

import argparse
import contextlib
import csv
import logging
import os
import secrets
import sys

import numpy as np

from .bench import MIN_TOTAL, bench_sampler, write_bench_csv
from .distribution import load_pmf_csv, normal_approx, tailed_101
from .gof import DEFAULT_GOF_METHODS, run_gof_experiment, write_gof_csv
from .methods import METHODS, Sampler
from .particle_filter import DEFAULT_PF_METHODS, UngmConfig, run_pf_experiment, write_pf_csv
from .samplers import DEFAULT_POLICY, SplitPolicy, shuffle_in_place

log = logging.getLogger("sasample")


def _int_list(text: str) -> list[int]:
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not values or any(v < 1 for v in values):
        raise argparse.ArgumentTypeError("values must be positive integers")
    return values


def _method_list(text: str) -> list[str]:
    names = [v.strip() for v in text.split(",") if v.strip()]
    bad = [v for v in names if v not in METHODS]
    if bad or not names:
        raise argparse.ArgumentTypeError(
            f"unknown method(s) {', '.join(bad) or text!r}; choose from {', '.join(METHODS)}"
        )
    return names


def _add_dist_args(p: argparse.ArgumentParser, default: str) -> None:
    g = p.add_argument_group("distribution")
    g.add_argument("--dist", choices=("normal", "tailed101", "pmf-file"), default=default)
    g.add_argument("--pmf-file", metavar="PATH", help="CSV with header value,prob (for --dist pmf-file)")
    g.add_argument("--n", type=int, default=1009, help="support points for --dist normal")
    g.add_argument("--width-sd", type=float, default=6.7,
                   help="half-width of the normal support in standard deviations")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=None,
                   help="random seed (falls back to $SAS_SEED, then to fresh entropy)")
    p.add_argument("--out", default="-", help="output CSV path ('-' for stdout)")


def _policy_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--epsilon", type=float, default=DEFAULT_POLICY.epsilon,
                   help="almost-divisibility threshold for SAS batch splitting (0 disables)")
    p.add_argument("--inflation", type=int, default=11, help="bin inflation factor for sas-urn")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sasample",
        description="Systematic alias sampling: draw samples, measure quality and speed, "
                    "run the particle-filter experiment.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="draw one batch of samples")
    _add_dist_args(p, "normal")
    p.add_argument("--k", type=int, required=True, help="batch size")
    p.add_argument("--method", choices=METHODS, default="sas")
    p.add_argument("--shuffle", action="store_true", help="shuffle the batch before writing")
    _policy_args(p)
    _add_common(p)

    p = sub.add_parser("gof", help="Cramer-von Mises quality experiment")
    _add_dist_args(p, "tailed101")
    p.add_argument("--kmax", type=int, default=None, help="largest batch size (default 2n)")
    p.add_argument("--runs", type=int, default=1000)
    p.add_argument("--methods", type=_method_list, default=list(DEFAULT_GOF_METHODS))
    p.add_argument("--baseline", choices=sorted(("iid-alias", "iid-binary")), default="iid-alias")
    p.add_argument("--threads", type=int, default=1)
    _policy_args(p)
    _add_common(p)

    p = sub.add_parser("bench", help="throughput benchmark (single thread)")
    _add_dist_args(p, "normal")
    p.add_argument("--methods", type=_method_list, default=list(METHODS))
    p.add_argument("--sizes", type=_int_list, default=None,
                   help="comma-separated bin counts for --dist normal (default: --n)")
    p.add_argument("--k", type=_int_list, default=[1, 10, 100, 1000, 10000])
    p.add_argument("--total", type=int, default=MIN_TOTAL, help="samples per measurement")
    p.add_argument("--repeats", type=int, default=5)
    _add_common(p)

    p = sub.add_parser("pf", help="particle filter on the non-linear growth model")
    p.add_argument("--particles", type=_int_list, default=[10, 20, 50, 100])
    p.add_argument("--series", type=int, default=1000)
    p.add_argument("--methods", type=_method_list, default=list(DEFAULT_PF_METHODS))
    p.add_argument("--steps", type=int, default=100, help="time steps per series")
    p.add_argument("--fold-sign", action="store_true",
                   help="score |particle| against |truth| instead of the signed states")
    p.add_argument("--epsilon", type=float, default=DEFAULT_POLICY.epsilon)
    _add_common(p)
    return parser


def resolve_seed(seed: int | None) -> int:
    if seed is not None:
        return seed
    env = os.environ.get("SAS_SEED")
    if env is not None and env.strip():
        return int(env)
    seed = secrets.randbits(32)
    print(f"sasample: using seed {seed}", file=sys.stderr)
    return seed


def _load_dist(args):
    if args.dist == "tailed101":
        return tailed_101()
    if args.dist == "pmf-file":
        if not args.pmf_file:
            raise ValueError("--dist pmf-file needs --pmf-file PATH")
        return load_pmf_csv(args.pmf_file)
    return normal_approx(args.n, args.width_sd)


@contextlib.contextmanager
def _open_out(path):
    if path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _cmd_sample(args, seed):
    if args.k < 0:
        raise ValueError("--k must be non-negative")
    dist = _load_dist(args)
    sampler = Sampler(args.method, dist, policy=SplitPolicy(epsilon=args.epsilon),
                      inflation=args.inflation)
    rng = np.random.default_rng(seed)
    samples = sampler.draw(rng, args.k)
    if args.shuffle:
        shuffle_in_place(samples, rng)
    with _open_out(args.out) as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "value"])
        for i, v in enumerate(samples):
            writer.writerow([i, repr(float(v))])


def _cmd_gof(args, seed):
    dist = _load_dist(args)
    k_max = args.kmax if args.kmax is not None else 2 * dist.n
    reports = run_gof_experiment(
        dist, args.methods, k_max, args.runs, seed,
        baseline=args.baseline, policy=SplitPolicy(epsilon=args.epsilon),
        inflation=args.inflation, threads=args.threads,
    )
    for rep in reports:
        print(f"{rep.method:>11}  relative W {rep.relative:.3f}  (ratio of means {rep.ratio_of_means:.3f})",
              file=sys.stderr)
    with _open_out(args.out) as fh:
        write_gof_csv(reports, fh)


def _cmd_bench(args, seed):
    if args.dist == "normal":
        dists = [normal_approx(n, args.width_sd) for n in (args.sizes or [args.n])]
    else:
        dists = [_load_dist(args)]
    results = []
    for dist in dists:
        for k in args.k:
            for method in args.methods:
                r = bench_sampler(method, dist.n, k, max(args.total, k), seed,
                                  repeats=args.repeats, dist=dist)
                log.info("%s n=%d k=%d: %.3g samples/s", method, dist.n, k, r.samples_per_second)
                results.append(r)
    with _open_out(args.out) as fh:
        write_bench_csv(results, fh)


def _cmd_pf(args, seed):
    cfg = UngmConfig(T=args.steps)
    report = run_pf_experiment(
        cfg, args.particles, args.methods, args.series, seed,
        policy=SplitPolicy(epsilon=args.epsilon), fold_sign=args.fold_sign,
    )
    for name, flagged in report.collapsed_steps.items():
        if flagged.any():
            log.warning("%s: %d steps had all likelihoods underflow", name, int(flagged.sum()))
    with _open_out(args.out) as fh:
        write_pf_csv(report, fh)


COMMANDS = {"sample": _cmd_sample, "gof": _cmd_gof, "bench": _cmd_bench, "pf": _cmd_pf}


def cli_main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    try:
        seed = resolve_seed(args.seed)
        COMMANDS[args.command](args, seed)
    except (ValueError, OSError) as exc:
        print(f"sasample: error: {exc}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(cli_main())
