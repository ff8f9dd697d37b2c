"""Discrete Cramer-von Mises statistic and the sampling-quality experiment."""

from __future__ import annotations

import csv
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from numba import njit

from .distribution import DiscreteDistribution
from .methods import METHODS, Sampler
from .samplers import DEFAULT_POLICY, SplitPolicy

__all__ = [
    "GofReport",
    "edf",
    "cvm_statistic",
    "run_gof_experiment",
    "write_gof_csv",
    "DEFAULT_GOF_METHODS",
]

DEFAULT_GOF_METHODS = ("iid-alias", "sys-binary", "sas", "sas-golden", "sas-urn")


@njit(cache=True, nogil=True)
def _counts(samples, support, counts):
    n = support.shape[0]
    for m in range(samples.shape[0]):
        s = samples[m]
        lo = 0
        hi = n - 1
        while lo < hi:
            mid = (lo + hi) >> 1
            if support[mid] < s:
                lo = mid + 1
            else:
                hi = mid
        if support[lo] != s:
            return m
        counts[lo] += 1
    return -1


@njit(cache=True, nogil=True)
def _cvm(counts, k, cdf):
    n = cdf.shape[0]
    acc = 0.0
    run = 0
    for i in range(n):
        run += counts[i]
        dev = run / k - cdf[i]
        acc += dev * dev
    return np.sqrt(acc / n)


def _count(samples, d: DiscreteDistribution) -> np.ndarray:
    samples = np.ascontiguousarray(samples, dtype=np.float64)
    counts = np.zeros(d.n, dtype=np.int64)
    bad = _counts(samples, d.support, counts)
    if bad >= 0:
        raise ValueError(f"sample {samples[bad]!r} is not in the support")
    return counts


def edf(samples, d: DiscreteDistribution) -> np.ndarray:
    """Empirical cdf of ``samples`` evaluated at every support point."""
    k = len(samples)
    if k < 1:
        raise ValueError("edf needs at least one sample")
    return np.cumsum(_count(samples, d)) / k


def cvm_statistic(samples, d: DiscreteDistribution) -> float:
    """Root of the mean squared edf-cdf deviation over the support points.

    >>> from sasample.distribution import from_pmf
    >>> round(cvm_statistic([0.0, 0.0], from_pmf([0, 1], [1, 1])), 5)
    0.35355
    """
    k = len(samples)
    if k < 1:
        raise ValueError("cvm_statistic needs at least one sample")
    return float(_cvm(_count(samples, d), k, d.cdf))


@dataclass
class GofReport:
    """Mean W per batch size k = 1..k_max for one method.

    ``relative`` (the average over k of the per-k ratio to the i.i.d.
    baseline) is the summary figure; ``ratio_of_means`` divides the
    k-averaged means instead.
    """

    method: str
    n: int
    per_k_W: np.ndarray
    runs: int
    relative_to_iid: np.ndarray
    ratio_of_means: float

    @property
    def k_max(self) -> int:
        return self.per_k_W.shape[0]

    @property
    def relative(self) -> float:
        return float(np.mean(self.relative_to_iid))


def _run_chunk(name, d, policy, inflation, ks, runs, seed):
    sampler = Sampler(name, d, policy=policy, inflation=inflation)
    support, cdf = d.support, d.cdf
    totals = np.zeros(len(ks))
    counts = np.zeros(d.n, dtype=np.int64)
    for run in runs:
        rng = np.random.default_rng(seed + run)
        sampler.reset()
        for j, k in enumerate(ks):
            samples = sampler.draw(rng, k)
            counts[:] = 0
            if _counts(samples, support, counts) >= 0:
                raise RuntimeError(f"{name} produced a value outside the support")
            totals[j] += _cvm(counts, k, cdf)
    return totals


def run_gof_experiment(
    d: DiscreteDistribution,
    methods=DEFAULT_GOF_METHODS,
    k_max: int = 202,
    runs: int = 1000,
    seed: int = 0,
    *,
    baseline: str = "iid-alias",
    policy: SplitPolicy = DEFAULT_POLICY,
    inflation: int = 11,
    threads: int = 1,
) -> list[GofReport]:
    """Mean W over ``runs`` batches for every method and every k in 1..k_max.

    Run ``r`` of every method uses the generator seeded with ``seed + r``.
    The baseline (an i.i.d. method) is added if missing and reported first.
    """
    if k_max < 1 or runs < 1:
        raise ValueError("k_max and runs must be positive")
    methods = list(methods)
    for name in methods + [baseline]:
        if name not in METHODS:
            raise ValueError(f"unknown method {name!r}")
    if baseline not in methods:
        methods.insert(0, baseline)
    ks = list(range(1, k_max + 1))

    def one(name):
        if threads <= 1:
            totals = _run_chunk(name, d, policy, inflation, ks, range(runs), seed)
        else:
            chunks = [range(i, runs, threads) for i in range(threads)]
            with ThreadPoolExecutor(threads) as pool:
                parts = pool.map(
                    lambda rs: _run_chunk(name, d, policy, inflation, ks, rs, seed), chunks
                )
                totals = np.sum(list(parts), axis=0)
        return totals / runs

    means = {name: one(name) for name in methods}
    base = means[baseline]
    with np.errstate(divide="ignore", invalid="ignore"):
        reports = []
        for name in methods:
            w = means[name]
            rel = np.where(base > 0, w / base, np.where(w > 0, np.inf, 1.0))
            rom = float(w.sum() / base.sum()) if base.sum() > 0 else 1.0
            reports.append(GofReport(name, d.n, w, runs, rel, rom))
    return reports


def write_gof_csv(reports: list[GofReport], out) -> None:
    """Write CSV rows to ``out``, a path or an open text file."""
    if not hasattr(out, "write"):
        with open(out, "w", newline="") as fh:
            write_gof_csv(reports, fh)
        return
    fh = out
    writer = csv.writer(fh)
    writer.writerow(["method", "n", "k", "mean_W", "rel_to_iid"])
    for rep in reports:
        for k in range(1, rep.k_max + 1):
            writer.writerow(
                [rep.method, rep.n, k, repr(float(rep.per_k_W[k - 1])),
                 repr(float(rep.relative_to_iid[k - 1]))]
            )
