"""Alias tables: O(n) construction and O(1) lookups.

A table with ``n`` equiprobable bins is stored as three parallel arrays.
Bin ``i`` returns ``aliased_values[i]`` when its fraction ``x`` satisfies
``x <= alias_probabilities[i]`` and ``values[i]`` otherwise. Single-valued
bins carry ``aliased_values[i] == values[i]`` and probability 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .distribution import DiscreteDistribution

__all__ = [
    "AliasTable",
    "build_alias_table",
    "build_urn_table",
    "sample",
    "sample_iid",
    "bin_masses",
]

# Residual scaled masses this close to 1 count as exactly average.
TIE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class AliasTable:
    """Equiprobable two-point mixture representation of a distribution.

    ``lower`` and ``upper`` hold the support indices behind ``values`` and
    ``aliased_values``; the samplers work on values, the oracles on indices.
    """

    values: np.ndarray
    aliased_values: np.ndarray
    alias_probabilities: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    dist: DiscreteDistribution

    @classmethod
    def from_bins(cls, d: DiscreteDistribution, lower, upper, prob) -> AliasTable:
        """Assemble a table from per-bin support indices and alias probabilities."""
        lower = np.asarray(lower)
        upper = np.asarray(upper)
        prob = np.asarray(prob, dtype=np.float64)
        if not lower.shape == upper.shape == prob.shape or lower.ndim != 1 or lower.size == 0:
            raise ValueError("lower, upper and prob must be equal-length non-empty 1-d arrays")
        if np.any((lower < 0) | (lower >= d.n) | (upper < 0) | (upper >= d.n)):
            raise ValueError("bin entries must be support indices")
        if np.any((prob < 0) | (prob > 1)):
            raise ValueError("alias probabilities must lie in [0, 1]")
        return _make_table(d, lower, upper, prob)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def __len__(self) -> int:
        return self.n

    def two_valued_bins(self, tol: float = 1e-12) -> int:
        return int(np.count_nonzero(
            (self.alias_probabilities > tol) & (self.lower != self.upper)
        ))

    def __repr__(self) -> str:
        return f"AliasTable(n={self.n}, support_size={self.dist.n})"


def _walker(masses: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Pair small and large entries of ``masses`` (mean 1) into bins.

    Bin ``i`` takes entry ``i`` as its lower value. Returns the alias index
    and alias probability per bin.
    """
    n = masses.shape[0]
    mass = masses.astype(np.float64, copy=True)
    upper = np.arange(n)
    prob = np.zeros(n)
    small: list[int] = []
    large: list[int] = []
    # Pushed in increasing order so popped pairs stay roughly adjacent.
    for i in range(n):
        if abs(mass[i] - 1.0) <= TIE_TOL:
            continue
        (small if mass[i] < 1.0 else large).append(i)
    while small and large:
        s = small.pop()
        g = large[-1]
        prob[s] = 1.0 - mass[s]
        upper[s] = g
        mass[g] -= prob[s]
        if abs(mass[g] - 1.0) <= TIE_TOL:
            large.pop()
        elif mass[g] < 1.0:
            small.append(large.pop())
    # Leftovers are rounding residue: keep them as single-valued bins.
    for i in small + large:
        prob[i] = 0.0
        upper[i] = i
    np.clip(prob, 0.0, 1.0, out=prob)
    return upper, prob


def _make_table(d: DiscreteDistribution, lower, upper, prob) -> AliasTable:
    lower = np.ascontiguousarray(lower, dtype=np.int64)
    upper = np.ascontiguousarray(upper, dtype=np.int64)
    prob = np.ascontiguousarray(prob, dtype=np.float64)
    values = np.ascontiguousarray(d.support[lower])
    aliased = np.ascontiguousarray(d.support[upper])
    for arr in (lower, upper, prob, values, aliased):
        arr.setflags(write=False)
    return AliasTable(values, aliased, prob, lower, upper, d)


def build_alias_table(d: DiscreteDistribution) -> AliasTable:
    """Build an ``n``-bin alias table for ``d`` in O(n).

    >>> from sasample.distribution import from_pmf
    >>> t = build_alias_table(from_pmf([0, 1, 2], [2, 1, 1]))
    >>> t.values, t.aliased_values, t.alias_probabilities
    (array([0., 1., 2.]), array([0., 0., 0.]), array([0.  , 0.25, 0.25]))
    """
    upper, prob = _walker(d.n * d.pmf)
    return _make_table(d, np.arange(d.n), upper, prob)


def _urn_counts(scaled: np.ndarray, n: int) -> np.ndarray:
    """Single-valued bin counts per value, leaving exactly ``n`` bins of residue."""
    counts = np.floor(scaled + 1e-9).astype(np.int64)
    counts = np.minimum(counts, np.ceil(scaled).astype(np.int64))
    frac = scaled - counts
    excess = int(counts.sum()) - (int(round(scaled.sum())) - n)
    # Hand back single bins, largest fractional residue first, until the
    # residue fills n bins.
    order = np.lexsort((np.arange(n), -frac))
    while excess > 0:
        progressed = False
        for i in order:
            if excess == 0:
                break
            if counts[i] > 0:
                counts[i] -= 1
                excess -= 1
                progressed = True
        if not progressed:
            break
    return counts


def build_urn_table(d: DiscreteDistribution, inflation: int) -> AliasTable:
    """Build an alias-urn table with ``inflation * n`` bins.

    Each value first receives as many single-valued bins as its mass
    allows; the remaining mass, exactly ``n`` bins worth, is packed with the
    ordinary construction. At most ``n`` bins end up two-valued. Bins are
    laid out in support order: the single-valued bins of a value precede
    its residue bin.
    """
    if int(inflation) != inflation or inflation < 1:
        raise ValueError(f"inflation must be a positive integer, got {inflation}")
    inflation = int(inflation)
    n = d.n
    if inflation == 1:
        return build_alias_table(d)
    total = inflation * n
    scaled = total * d.pmf
    counts = _urn_counts(scaled, n)
    residue = np.maximum(scaled - counts, 0.0)
    residue *= n / residue.sum()
    res_upper, res_prob = _walker(residue)

    lower = np.empty(total, dtype=np.int64)
    upper = np.empty(total, dtype=np.int64)
    prob = np.zeros(total)
    pos = 0
    for v in range(n):
        c = counts[v]
        lower[pos:pos + c] = v
        upper[pos:pos + c] = v
        pos += c
        lower[pos] = v
        upper[pos] = res_upper[v]
        prob[pos] = res_prob[v]
        pos += 1
    assert pos == total
    return _make_table(d, lower, upper, prob)


def bin_masses(t: AliasTable) -> np.ndarray:
    """Probability mass per support index implied by the table."""
    n_support = t.dist.n
    w = 1.0 / t.n
    mass = np.bincount(t.lower, weights=w * (1.0 - t.alias_probabilities), minlength=n_support)
    mass += np.bincount(t.upper, weights=w * t.alias_probabilities, minlength=n_support)
    return mass


def sample(t: AliasTable, i: int, x: float) -> float:
    """Alias lookup in bin ``i`` with in-bin fraction ``x``.

    Negative ``x`` from rounding behaves like ``x == 0``.
    """
    if not 0 <= i < t.n:
        raise IndexError(f"bin index {i} out of range [0, {t.n - 1}]")
    if x <= t.alias_probabilities[i]:
        return float(t.aliased_values[i])
    return float(t.values[i])


@njit(cache=True, nogil=True)
def _iid_fill(values, aliased, probs, u, out):
    n = values.shape[0]
    for m in range(u.shape[0]):
        y = n * u[m]
        i = int(y)
        if i > n - 1:
            i = n - 1
        if y - i <= probs[i]:
            out[m] = aliased[i]
        else:
            out[m] = values[i]


def sample_iid(t: AliasTable, rng: np.random.Generator, k: int) -> np.ndarray:
    """Draw ``k`` independent samples, one uniform per sample."""
    if k < 0:
        raise ValueError(f"k must be non-negative, got {k}")
    u = rng.random(k)
    out = np.empty(k)
    _iid_fill(t.values, t.aliased_values, t.alias_probabilities, u, out)
    return out
