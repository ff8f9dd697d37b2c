"""Bootstrap particle filter on the univariate non-stationary growth model.

The transition noise is drawn from a discretized standard normal through
any of the named batch samplers, which lets the filter error be compared
across sampling methods. Systematic samplers emit spatially ordered
batches, so their output is permuted before use.
"""

from __future__ import annotations

import csv
import math
import time
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .distribution import normal_approx
from .methods import METHODS, Sampler
from .samplers import DEFAULT_POLICY, SplitPolicy

__all__ = [
    "UngmConfig",
    "FilterTrace",
    "PfReport",
    "ungm_drift",
    "simulate_ungm",
    "systematic_resample",
    "run_pf",
    "run_pf_experiment",
    "write_pf_csv",
    "transition_noise",
    "DEFAULT_PF_METHODS",
]

DEFAULT_PF_METHODS = ("iid-binary", "sys-binary", "sas", "sas-urn")


@dataclass(frozen=True)
class UngmConfig:
    T: int = 100
    process_noise_sd: float = math.sqrt(10.0)
    measurement_noise_sd: float = 1.0
    x0: float = 0.1

    def __post_init__(self):
        if self.T < 1:
            raise ValueError("T must be at least 1")
        if not (self.process_noise_sd > 0 and self.measurement_noise_sd > 0):
            raise ValueError("noise standard deviations must be positive")


@dataclass
class FilterTrace:
    """Per-step weighted absolute error; ``collapsed`` marks steps whose weights were reset."""

    errors: np.ndarray
    collapsed: np.ndarray

    def __len__(self):
        return self.errors.shape[0]


@dataclass
class PfReport:
    particle_counts: list[int]
    rmse_per_method: dict[str, np.ndarray] = field(default_factory=dict)
    time_per_run: dict[str, np.ndarray] = field(default_factory=dict)
    collapsed_steps: dict[str, np.ndarray] = field(default_factory=dict)


def ungm_drift(x, k):
    return 0.5 * x + 25.0 * x / (1.0 + x * x) + 8.0 * np.cos(1.2 * k)


def simulate_ungm(cfg: UngmConfig, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """True states x_1..x_T and observations y_1..y_T, starting from ``cfg.x0``."""
    v = rng.standard_normal(cfg.T) * cfg.process_noise_sd
    w = rng.standard_normal(cfg.T) * cfg.measurement_noise_sd
    states = np.empty(cfg.T)
    x = cfg.x0
    for k in range(1, cfg.T + 1):
        x = ungm_drift(x, k) + v[k - 1]
        states[k - 1] = x
    obs = states * states / 20.0 + w
    return states, obs


@njit(cache=True, nogil=True)
def _resample_into(weights, r0, out):
    n_out = out.shape[0]
    last = weights.shape[0] - 1
    c = weights[0]
    i = 0
    for j in range(n_out):
        u = r0 + j / n_out
        while u >= c and i < last:
            i += 1
            c += weights[i]
        out[j] = i


def systematic_resample(weights, rng: np.random.Generator | None, r0: float | None = None) -> np.ndarray:
    """Indices of ``len(weights)`` systematically resampled particles, ascending."""
    weights = np.ascontiguousarray(weights, dtype=np.float64)
    n = weights.shape[0]
    if n < 1:
        raise ValueError("need at least one weight")
    if np.any(weights < 0) or abs(weights.sum() - 1.0) > 1e-9:
        raise ValueError("weights must be non-negative and sum to 1")
    if r0 is None:
        r0 = rng.random() / n
    elif not 0.0 <= r0 < 1.0 / n:
        raise ValueError(f"r0 must lie in [0, 1/N), got {r0}")
    out = np.empty(n, dtype=np.int64)
    _resample_into(weights, r0, out)
    return out


@njit(cache=True, nogil=True)
def _filter(noise, offsets, obs, states, x0, meas_sd, fold_sign, errors, collapsed):
    steps, n = noise.shape
    x = np.full(n, x0)
    logw = np.empty(n)
    w = np.empty(n)
    idx = np.empty(n, dtype=np.int64)
    inv2var = 0.5 / (meas_sd * meas_sd)
    for t in range(steps):
        k = t + 1
        trend = 8.0 * np.cos(1.2 * k)
        for i in range(n):
            xi = x[i]
            x[i] = 0.5 * xi + 25.0 * xi / (1.0 + xi * xi) + trend + noise[t, i]
        y = obs[t]
        top = -np.inf
        for i in range(n):
            r = y - x[i] * x[i] / 20.0
            logw[i] = -r * r * inv2var
            if logw[i] > top:
                top = logw[i]
        total = 0.0
        if np.isfinite(top):
            for i in range(n):
                w[i] = np.exp(logw[i] - top)
                total += w[i]
        if not (total > 0.0 and np.isfinite(total)):
            collapsed[t] = True
            for i in range(n):
                w[i] = 1.0 / n
        else:
            for i in range(n):
                w[i] /= total
        err = 0.0
        truth = states[t]
        if fold_sign:
            truth = abs(truth)
            for i in range(n):
                err += w[i] * abs(abs(x[i]) - truth)
        else:
            for i in range(n):
                err += w[i] * abs(x[i] - truth)
        errors[t] = err
        _resample_into(w, offsets[t] / n, idx)
        for i in range(n):
            logw[i] = x[idx[i]]
        for i in range(n):
            x[i] = logw[i]


def transition_noise(n: int = 1009, half_width_sd: float = 6.7):
    """The discretized unit normal the filter draws its transition noise from."""
    return normal_approx(n, half_width_sd)


def run_pf(
    cfg: UngmConfig,
    n_particles: int,
    noise_sampler: Sampler,
    series: tuple[np.ndarray, np.ndarray],
    rng: np.random.Generator,
    *,
    fold_sign: bool = False,
) -> FilterTrace:
    """Filter one simulated series with ``n_particles`` particles.

    One noise batch of ``n_particles`` is drawn per step; batches from
    systematic samplers are permuted by a permutation fixed for the run.
    The error at step k is the weighted mean of |particle - truth| taken
    before resampling. With ``fold_sign`` the error compares |particle|
    with |truth| instead, since the observation cannot tell x from -x.
    """
    if n_particles < 1:
        raise ValueError("need at least one particle")
    states, obs = series
    if len(states) != cfg.T or len(obs) != cfg.T:
        raise ValueError("series length does not match cfg.T")
    perm = rng.permutation(n_particles) if noise_sampler.systematic else None
    noise = np.empty((cfg.T, n_particles))
    for t in range(cfg.T):
        batch = noise_sampler.draw(rng, n_particles)
        noise[t] = batch[perm] if perm is not None else batch
    noise *= cfg.process_noise_sd
    offsets = rng.random(cfg.T)
    errors = np.empty(cfg.T)
    collapsed = np.zeros(cfg.T, dtype=np.bool_)
    _filter(noise, offsets, np.asarray(obs, dtype=np.float64),
            np.asarray(states, dtype=np.float64), cfg.x0, cfg.measurement_noise_sd,
            fold_sign, errors, collapsed)
    return FilterTrace(errors, collapsed)


def run_pf_experiment(
    cfg: UngmConfig,
    particle_counts,
    methods=DEFAULT_PF_METHODS,
    series_count: int = 1000,
    seed: int = 0,
    *,
    policy: SplitPolicy = DEFAULT_POLICY,
    noise=None,
    fold_sign: bool = False,
) -> PfReport:
    """RMSE over all steps and series for every (method, particle count).

    Series ``s`` is simulated from ``(seed, s)`` and shared by all methods
    and particle counts; the filter stream for a run is derived from
    ``(seed, s, N, method index)``.
    """
    counts = [int(c) for c in particle_counts]
    if not counts or any(c < 1 for c in counts):
        raise ValueError("particle counts must be positive")
    if series_count < 1:
        raise ValueError("series_count must be positive")
    for name in methods:
        if name not in METHODS:
            raise ValueError(f"unknown method {name!r}")
    dist = noise if noise is not None else transition_noise()
    samplers = {name: Sampler(name, dist, policy=policy) for name in methods}
    series = [simulate_ungm(cfg, np.random.default_rng([seed, s])) for s in range(series_count)]
    report = PfReport(counts)
    for m_idx, name in enumerate(methods):
        sampler = samplers[name]
        rmse = np.empty(len(counts))
        seconds = np.empty(len(counts))
        flagged = np.zeros(len(counts), dtype=np.int64)
        # Untimed pass so compilation does not land in the first timing.
        run_pf(cfg, counts[0], sampler, series[0], np.random.default_rng(0))
        for c_idx, n_particles in enumerate(counts):
            sq = 0.0
            start = time.perf_counter()
            for s, ser in enumerate(series):
                rng = np.random.default_rng([seed, s, n_particles, m_idx])
                sampler.reset()
                trace = run_pf(cfg, n_particles, sampler, ser, rng, fold_sign=fold_sign)
                sq += float(np.dot(trace.errors, trace.errors))
                flagged[c_idx] += int(trace.collapsed.sum())
            seconds[c_idx] = (time.perf_counter() - start) / series_count
            rmse[c_idx] = math.sqrt(sq / (series_count * cfg.T))
        report.rmse_per_method[name] = rmse
        report.time_per_run[name] = seconds
        report.collapsed_steps[name] = flagged
    return report


def write_pf_csv(report: PfReport, out) -> None:
    """Write CSV rows to ``out``, a path or an open text file."""
    if not hasattr(out, "write"):
        with open(out, "w", newline="") as fh:
            write_pf_csv(report, fh)
        return
    fh = out
    writer = csv.writer(fh)
    writer.writerow(["method", "N", "rmse", "seconds_per_run"])
    for name, rmse in report.rmse_per_method.items():
        for i, n_particles in enumerate(report.particle_counts):
            writer.writerow(
                [name, n_particles, repr(float(rmse[i])),
                 repr(float(report.time_per_run[name][i]))]
            )
