"""Finite discrete distributions and the test distributions built from densities."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np
from scipy.stats import norm

__all__ = [
    "DiscreteDistribution",
    "from_pmf",
    "discretize",
    "tailed_101",
    "normal_approx",
    "quantile",
    "load_pmf_csv",
]

NORMALIZATION_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class DiscreteDistribution:
    """A distribution over ``n`` strictly increasing real support points.

    Instances are immutable; use :func:`from_pmf` (or one of the builders)
    rather than the constructor so that weights get normalized and the
    cumulative distribution is cached.
    """

    support: np.ndarray
    pmf: np.ndarray
    cdf: np.ndarray

    @property
    def n(self) -> int:
        return self.support.shape[0]

    def __len__(self) -> int:
        return self.n

    def mean(self) -> float:
        return float(np.dot(self.support, self.pmf))

    def quantile(self, u: float) -> float:
        return quantile(self, u)

    def index_of(self, values) -> np.ndarray:
        """Map support values to their indices; raise if any value is not in the support."""
        values = np.asarray(values, dtype=np.float64)
        idx = np.searchsorted(self.support, values)
        idx = np.minimum(idx, self.n - 1)
        bad = self.support[idx] != values
        if np.any(bad):
            raise ValueError(f"value {values[bad][0]!r} is not in the support")
        return idx

    def __repr__(self) -> str:
        return f"DiscreteDistribution(n={self.n}, support=[{self.support[0]:g}, {self.support[-1]:g}])"


def _cumulative(pmf: np.ndarray) -> np.ndarray:
    cdf = np.minimum(np.cumsum(pmf), 1.0)
    # Pin the tail to exactly 1 from the last positive entry so that every
    # u in [0, 1) has a match and trailing zero-mass points are never chosen.
    last = int(np.flatnonzero(pmf > 0)[-1])
    cdf[last:] = 1.0
    return cdf


def from_pmf(support, weights) -> DiscreteDistribution:
    """Build a distribution from support points and non-negative weights.

    Weights need not be normalized.

    >>> from_pmf([0, 1, 2], [1, 2, 1]).pmf
    array([0.25, 0.5 , 0.25])
    """
    support = np.array(support, dtype=np.float64).ravel()
    weights = np.array(weights, dtype=np.float64).ravel()
    if support.shape != weights.shape:
        raise ValueError(
            f"support and weights differ in length ({support.size} != {weights.size})"
        )
    if support.size == 0:
        raise ValueError("distribution needs at least one support point")
    if not np.all(np.isfinite(support)):
        raise ValueError("support values must be finite")
    if np.any(np.diff(support) <= 0):
        raise ValueError("support must be strictly increasing")
    if not np.all(np.isfinite(weights)):
        raise ValueError("weights must be finite")
    if np.any(weights < 0):
        raise ValueError("weights must be non-negative")
    total = weights.sum()
    if not total > 0:
        raise ValueError("at least one weight must be positive")
    pmf = weights / total
    cdf = _cumulative(pmf)
    for arr in (support, pmf, cdf):
        arr.setflags(write=False)
    return DiscreteDistribution(support, pmf, cdf)


def discretize(
    density: Callable[[np.ndarray], np.ndarray], a: float, b: float, n: int
) -> DiscreteDistribution:
    """Approximate ``density`` on ``[a, b]`` by ``n`` equidistant point masses.

    The density is evaluated at the grid points (no cell integration) and the
    values are normalized. With ``n == 1`` the single point is the midpoint.
    """
    if not a < b:
        raise ValueError(f"need a < b, got a={a}, b={b}")
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    if n == 1:
        support = np.array([0.5 * (a + b)])
    else:
        support = a + np.arange(n) * ((b - a) / (n - 1))
        support[-1] = b
    dens = np.asarray(density(support), dtype=np.float64)
    if dens.shape != support.shape:
        dens = np.broadcast_to(dens, support.shape).copy()
    if not np.all(np.isfinite(dens)) or np.any(dens < 0):
        raise ValueError("density must be finite and non-negative on [a, b]")
    if not np.any(dens > 0):
        raise ValueError("density is zero at every grid point")
    return from_pmf(support, dens)


def tailed_101() -> DiscreteDistribution:
    """Normal pdf plus a constant floor of 0.02 on 101 points over [-10, 10]."""
    return discretize(lambda x: norm.pdf(x) + 0.02, -10.0, 10.0, 101)


def normal_approx(n: int, half_width_sd: float) -> DiscreteDistribution:
    """Standard normal discretized on ``n`` points over ``±half_width_sd``."""
    if not half_width_sd > 0:
        raise ValueError("half_width_sd must be positive")
    return discretize(norm.pdf, -half_width_sd, half_width_sd, n)


def quantile(d: DiscreteDistribution, u: float) -> float:
    """Return the support value at the smallest index ``i`` with ``cdf[i] > u``."""
    if not 0.0 <= u < 1.0:
        raise ValueError(f"u must lie in [0, 1), got {u}")
    lo, hi = 0, d.n - 1
    cdf = d.cdf
    while lo < hi:
        mid = (lo + hi) // 2
        if cdf[mid] > u:
            hi = mid
        else:
            lo = mid + 1
    return float(d.support[lo])


def load_pmf_csv(path: str | Path) -> DiscreteDistribution:
    """Read a ``value,prob`` CSV file (header required) into a distribution."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != ["value", "prob"]:
            raise ValueError(f"{path}: expected header 'value,prob', got {reader.fieldnames}")
        values, probs = [], []
        for lineno, row in enumerate(reader, start=2):
            try:
                values.append(float(row["value"]))
                probs.append(float(row["prob"]))
            except (TypeError, ValueError) as exc:
                raise ValueError(f"{path}:{lineno}: bad row {row}") from exc
    if not values:
        raise ValueError(f"{path}: no rows")
    if any(math.isnan(p) for p in probs):
        raise ValueError(f"{path}: NaN probability")
    return from_pmf(values, probs)
