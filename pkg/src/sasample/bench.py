"""Throughput measurement for the batch samplers."""

from __future__ import annotations

import csv
import math
import statistics
import time
from dataclasses import dataclass

import numpy as np

from .distribution import DiscreteDistribution, normal_approx
from .methods import METHODS, Sampler

__all__ = ["BenchResult", "bench_sampler", "write_bench_csv", "MIN_TOTAL"]

MIN_TOTAL = 10**6


@dataclass(frozen=True)
class BenchResult:
    method: str
    n: int
    k: int
    samples_per_second: float
    total_samples: int
    checksum: float
    repeats: int


def _timed_pass(sampler: Sampler, k: int, calls: int, seed: int) -> tuple[float, float]:
    rng = np.random.default_rng(seed)
    sampler.reset()
    draw = sampler.draw
    checksum = 0.0
    last = k - 1
    start = time.perf_counter()
    for _ in range(calls):
        # Allocation is part of every draw; touching one value keeps the result live.
        checksum += draw(rng, k)[last]
    return time.perf_counter() - start, checksum


def bench_sampler(
    method: str,
    n: int,
    k: int,
    total: int = MIN_TOTAL,
    seed: int = 0,
    *,
    repeats: int = 5,
    dist: DiscreteDistribution | None = None,
    half_width_sd: float = 6.7,
) -> BenchResult:
    """Samples per second for ``method`` drawing batches of ``k`` from ``n`` bins.

    Times ``ceil(total / k)`` calls per repetition after a warm-up of at
    least ``total / 10`` samples, and reports the median over ``repeats``.
    Every repetition restarts the generator from ``seed``, so the checksum
    is the same across repetitions and runs.
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; choose from {', '.join(METHODS)}")
    if k < 1:
        raise ValueError("k must be positive")
    if k > total:
        raise ValueError(f"batch size k={k} exceeds total={total}")
    if repeats < 1:
        raise ValueError("repeats must be positive")
    if dist is None:
        dist = normal_approx(n, half_width_sd)
    sampler = Sampler(method, dist)
    calls = math.ceil(total / k)
    _timed_pass(sampler, k, max(1, math.ceil(calls / 10)), seed + 1)
    times = []
    checksum = None
    for _ in range(repeats):
        elapsed, cs = _timed_pass(sampler, k, calls, seed)
        if checksum is not None and cs != checksum:
            raise RuntimeError(f"{method}: checksum changed between repetitions")
        checksum = cs
        times.append(elapsed)
    samples = calls * k
    return BenchResult(method, dist.n, k, samples / statistics.median(times), samples, checksum, repeats)


def write_bench_csv(results, out) -> None:
    """Write CSV rows to ``out``, a path or an open text file."""
    if not hasattr(out, "write"):
        with open(out, "w", newline="") as fh:
            write_bench_csv(results, fh)
        return
    fh = out
    writer = csv.writer(fh)
    writer.writerow(["method", "n", "k", "samples_per_second"])
    for r in results:
        writer.writerow([r.method, r.n, r.k, repr(float(r.samples_per_second))])
