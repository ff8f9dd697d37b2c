"""Named batch samplers, so experiments and the CLI can pick methods by string."""

from __future__ import annotations

import numpy as np

from .alias import build_alias_table, build_urn_table, sample_iid
from .distribution import DiscreteDistribution
from .samplers import (
    DEFAULT_POLICY,
    GoldenRatioSequence,
    SplitPolicy,
    iid_binary,
    sample_golden,
    sample_systematic,
    systematic_cdf_binary,
    systematic_cdf_linear,
)

__all__ = ["METHODS", "SYSTEMATIC_METHODS", "IID_METHODS", "Sampler", "make_sampler"]

METHODS = ("iid-binary", "iid-alias", "sas", "sas-golden", "sas-urn", "sys-binary", "sys-linear")
IID_METHODS = frozenset({"iid-binary", "iid-alias"})
SYSTEMATIC_METHODS = frozenset(METHODS) - IID_METHODS

URN_INFLATION = 11


class Sampler:
    """A distribution bound to one sampling method.

    Tables are built once at construction. The golden-ratio method keeps
    its sequence between calls; :meth:`reset` starts a fresh sequence.
    """

    def __init__(
        self,
        name: str,
        dist: DiscreteDistribution,
        policy: SplitPolicy = DEFAULT_POLICY,
        inflation: int = URN_INFLATION,
    ):
        if name not in METHODS:
            raise ValueError(f"unknown method {name!r}; choose from {', '.join(METHODS)}")
        self.name = name
        self.dist = dist
        self.policy = policy
        self.table = None
        if name in ("iid-alias", "sas", "sas-golden"):
            self.table = build_alias_table(dist)
        elif name == "sas-urn":
            self.table = build_urn_table(dist, inflation)
        self.sequence: GoldenRatioSequence | None = None

    @property
    def systematic(self) -> bool:
        return self.name in SYSTEMATIC_METHODS

    def reset(self) -> None:
        self.sequence = None

    def draw(self, rng: np.random.Generator, k: int) -> np.ndarray:
        name = self.name
        if name in ("sas", "sas-urn"):
            return sample_systematic(self.table, rng, k, self.policy)
        if name == "iid-alias":
            return sample_iid(self.table, rng, k)
        if name == "iid-binary":
            return iid_binary(self.dist, rng, k)
        if name == "sas-golden":
            if self.sequence is None:
                self.sequence = GoldenRatioSequence.random(rng)
            return sample_golden(self.table, rng, self.sequence, k)
        if k == 0:
            return np.empty(0)
        if name == "sys-binary":
            return systematic_cdf_binary(self.dist, rng, k)
        return systematic_cdf_linear(self.dist, rng, k)

    __call__ = draw

    def __repr__(self) -> str:
        return f"Sampler({self.name!r}, n={self.dist.n})"


def make_sampler(name: str, dist: DiscreteDistribution, **kwargs) -> Sampler:
    return Sampler(name, dist, **kwargs)
