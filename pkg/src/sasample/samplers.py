"""Batch samplers over alias tables and cdfs.

Systematic Alias Sampling (SAS) places ``k`` equidistant points in
``[0, n)`` from a single random offset and reads each point through the
alias table: the integer part picks the bin, the fractional part picks the
lower or upper value. When ``k`` nearly divides a small multiple of ``n``
the points land on the same bin level and the batch is split in two
(see :class:`SplitPolicy`).

All samplers take a ``numpy.random.Generator`` as the uniform source and
return a float array of support values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np
from numba import njit

from .alias import AliasTable
from .distribution import DiscreteDistribution

__all__ = [
    "SplitPolicy",
    "DEFAULT_POLICY",
    "NO_SPLIT",
    "GoldenRatioSequence",
    "PHI_FRAC",
    "distance_to_nearest_integer",
    "almost_divides",
    "needs_split",
    "split_sizes",
    "batch_plan",
    "sample_systematic",
    "systematic_batch",
    "golden_next",
    "sample_golden",
    "systematic_cdf_binary",
    "systematic_cdf_linear",
    "iid_binary",
    "shuffle_in_place",
]

PHI_FRAC = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class SplitPolicy:
    """When and how SAS splits a batch.

    A batch of ``k`` from an ``n``-bin table is split when ``k > k_min``
    and ``k`` is an ``epsilon``-divisor of ``i * n`` for some ``i`` in
    ``multipliers``. ``epsilon = 0`` disables splitting.
    """

    multipliers: tuple[int, ...] = (1, 4, 5, 6)
    epsilon: float = 0.07
    k_min: int = 15
    small_batch_ratio: Fraction = field(default=Fraction(6, 13))

    def __post_init__(self):
        if not self.multipliers or any(int(m) != m or m < 1 for m in self.multipliers):
            raise ValueError("multipliers must be positive integers")
        if not 0.0 <= self.epsilon < 0.5:
            raise ValueError(f"epsilon must lie in [0, 0.5), got {self.epsilon}")
        if self.k_min < 1:
            raise ValueError("k_min must be positive")
        object.__setattr__(self, "multipliers", tuple(int(m) for m in self.multipliers))
        object.__setattr__(self, "small_batch_ratio", Fraction(self.small_batch_ratio))
        object.__setattr__(self, "_hash", hash(
            (self.multipliers, self.epsilon, self.k_min, self.small_batch_ratio)
        ))

    # Policies key the plan caches, which sit on the per-batch hot path.
    def __hash__(self):
        return self._hash


DEFAULT_POLICY = SplitPolicy()
NO_SPLIT = SplitPolicy(epsilon=0.0)


def distance_to_nearest_integer(x: float) -> float:
    frac = x - math.floor(x)
    return min(frac, 1.0 - frac)


def almost_divides(a: float, b: float, epsilon: float) -> bool:
    """True when ``a`` is an ``epsilon``-divisor of ``b``."""
    if not (a > 0 and b > 0):
        raise ValueError("almost_divides needs positive arguments")
    return distance_to_nearest_integer(b / a) < epsilon


def needs_split(n: int, k: int, policy: SplitPolicy = DEFAULT_POLICY) -> bool:
    # k == k_min is a base case so that recursion always terminates.
    if k <= policy.k_min:
        return False
    return any(almost_divides(k, m * n, policy.epsilon) for m in policy.multipliers)


def split_sizes(k: int, policy: SplitPolicy = DEFAULT_POLICY) -> tuple[int, int]:
    """Sizes ``(k - l, l)`` of the two sub-batches for a split batch of ``k``."""
    if k <= policy.k_min:
        raise ValueError(f"cannot split k={k} <= k_min={policy.k_min}")
    if k < 4 * policy.k_min:
        small = policy.k_min
    else:
        r = policy.small_batch_ratio
        small = (k * r.numerator) // r.denominator
    return k - small, small


@lru_cache(maxsize=4096)
def batch_plan(n: int, k: int, policy: SplitPolicy = DEFAULT_POLICY) -> tuple[int, ...]:
    """Sizes of the unsplit sub-batches SAS draws for a batch of ``k``, in order."""
    if k == 0:
        return ()
    if needs_split(n, k, policy):
        a, b = split_sizes(k, policy)
        return batch_plan(n, a, policy) + batch_plan(n, b, policy)
    return (k,)


@lru_cache(maxsize=4096)
def _plan_array(n: int, k: int, policy: SplitPolicy) -> np.ndarray:
    sizes = np.array(batch_plan(n, k, policy), dtype=np.int64)
    sizes.setflags(write=False)
    return sizes


@njit(cache=True, nogil=True)
def _systematic_fill(values, aliased, probs, sizes, offsets, out):
    n = values.shape[0]
    pos = 0
    for b in range(sizes.shape[0]):
        k = sizes[b]
        step = n / k
        # Walk downwards so rounding drift ends at sample(0, -tiny), never past n.
        x = n - offsets[b] * step
        for _ in range(k):
            j = int(x)
            if j > n - 1:
                j = n - 1
            if x - j <= probs[j]:
                out[pos] = aliased[j]
            else:
                out[pos] = values[j]
            pos += 1
            x -= step


def systematic_batch(t: AliasTable, k: int, r0: float) -> np.ndarray:
    """One unsplit SAS batch with the explicit offset ``r0`` in ``[0, n/k)``.

    Points are visited from the top bin downwards.
    """
    if k < 0:
        raise ValueError(f"k must be non-negative, got {k}")
    out = np.empty(k)
    if k == 0:
        return out
    step = t.n / k
    if not 0.0 <= r0 < step:
        raise ValueError(f"r0 must lie in [0, {step}), got {r0}")
    _systematic_fill(
        t.values, t.aliased_values, t.alias_probabilities,
        np.array([k], dtype=np.int64), np.array([r0 / step]), out,
    )
    return out


def sample_systematic(
    t: AliasTable,
    rng: np.random.Generator,
    k: int,
    policy: SplitPolicy = DEFAULT_POLICY,
) -> np.ndarray:
    """Draw ``k`` samples with SAS, splitting nearly-divisible batch sizes.

    Each sub-batch gets its own random offset. Output is in generation
    order (spatially correlated); shuffle separately if the consumer needs it.
    """
    if k < 0:
        raise ValueError(f"k must be non-negative, got {k}")
    sizes = _plan_array(t.n, k, policy)
    out = np.empty(k)
    if k == 0:
        return out
    _systematic_fill(
        t.values, t.aliased_values, t.alias_probabilities,
        sizes, rng.random(sizes.shape[0]), out,
    )
    return out


class GoldenRatioSequence:
    """Additive recurrence ``x <- frac(x + phi)`` on the unit interval."""

    __slots__ = ("state",)

    def __init__(self, state: float = 0.0):
        if not 0.0 <= state < 1.0:
            raise ValueError(f"state must lie in [0, 1), got {state}")
        self.state = float(state)

    @classmethod
    def random(cls, rng: np.random.Generator) -> GoldenRatioSequence:
        return cls(rng.random())

    def __repr__(self) -> str:
        return f"GoldenRatioSequence(state={self.state!r})"


def golden_next(seq: GoldenRatioSequence) -> float:
    x = seq.state + PHI_FRAC
    if x >= 1.0:
        x -= 1.0
    seq.state = x
    return x


@njit(cache=True, nogil=True)
def _golden_fill(values, aliased, probs, state, u0, phi, out):
    n = values.shape[0]
    x = state
    for m in range(out.shape[0]):
        x += phi
        if x >= 1.0:
            x -= 1.0
        s = x + u0
        if s >= 1.0:
            s -= 1.0
        y = n * s
        i = int(y)
        if i > n - 1:
            i = n - 1
        if y - i <= probs[i]:
            out[m] = aliased[i]
        else:
            out[m] = values[i]
    return x


def sample_golden(
    t: AliasTable,
    rng: np.random.Generator,
    seq: GoldenRatioSequence,
    k: int,
) -> np.ndarray:
    """Draw ``k`` samples at the next ``k`` golden-ratio points, shifted by a fresh ``u0``."""
    if k < 0:
        raise ValueError(f"k must be non-negative, got {k}")
    out = np.empty(k)
    if k == 0:
        return out
    u0 = rng.random()
    seq.state = _golden_fill(
        t.values, t.aliased_values, t.alias_probabilities, seq.state, u0, PHI_FRAC, out
    )
    return out


@njit(cache=True, nogil=True)
def _binary_fill(cdf, support, u, out):
    last = cdf.shape[0] - 1
    for m in range(u.shape[0]):
        target = u[m]
        lo = 0
        hi = last
        while lo < hi:
            mid = (lo + hi) >> 1
            if cdf[mid] > target:
                hi = mid
            else:
                lo = mid + 1
        out[m] = support[lo]


@njit(cache=True, nogil=True)
def _systematic_binary_fill(cdf, support, r0, out):
    k = out.shape[0]
    last = cdf.shape[0] - 1
    for m in range(k):
        target = r0 + m / k
        lo = 0
        hi = last
        while lo < hi:
            mid = (lo + hi) >> 1
            if cdf[mid] > target:
                hi = mid
            else:
                lo = mid + 1
        out[m] = support[lo]


@njit(cache=True, nogil=True)
def _systematic_linear_fill(cdf, support, r0, out):
    k = out.shape[0]
    last = cdf.shape[0] - 1
    j = 0
    for m in range(k):
        target = r0 + m / k
        while j < last and cdf[j] <= target:
            j += 1
        out[m] = support[j]


def _systematic_offset(rng, k, r0):
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    if r0 is None:
        return rng.random() / k
    if not 0.0 <= r0 < 1.0 / k:
        raise ValueError(f"r0 must lie in [0, 1/k), got {r0}")
    return float(r0)


def systematic_cdf_binary(
    d: DiscreteDistribution, rng: np.random.Generator | None, k: int, r0: float | None = None
) -> np.ndarray:
    """Systematic sampling on the cdf, one binary search per point. O(k log n)."""
    r0 = _systematic_offset(rng, k, r0)
    out = np.empty(k)
    _systematic_binary_fill(d.cdf, d.support, r0, out)
    return out


def systematic_cdf_linear(
    d: DiscreteDistribution, rng: np.random.Generator | None, k: int, r0: float | None = None
) -> np.ndarray:
    """Systematic sampling on the cdf in a single forward pass. O(n + k)."""
    r0 = _systematic_offset(rng, k, r0)
    out = np.empty(k)
    _systematic_linear_fill(d.cdf, d.support, r0, out)
    return out


def iid_binary(d: DiscreteDistribution, rng: np.random.Generator, k: int) -> np.ndarray:
    """Independent samples by binary search of uniforms on the cdf."""
    if k < 0:
        raise ValueError(f"k must be non-negative, got {k}")
    u = rng.random(k)
    out = np.empty(k)
    _binary_fill(d.cdf, d.support, u, out)
    return out


def shuffle_in_place(xs, rng: np.random.Generator):
    """Fisher-Yates shuffle of ``xs``; returns ``xs``."""
    rng.shuffle(xs)
    return xs
