"""Systematic alias sampling of discrete distributions."""

from .alias import AliasTable, build_alias_table, build_urn_table, sample, sample_iid
from .distribution import (
    DiscreteDistribution,
    discretize,
    from_pmf,
    load_pmf_csv,
    normal_approx,
    quantile,
    tailed_101,
)
from .methods import METHODS, Sampler, make_sampler
from .samplers import (
    DEFAULT_POLICY,
    GoldenRatioSequence,
    SplitPolicy,
    almost_divides,
    distance_to_nearest_integer,
    golden_next,
    needs_split,
    sample_golden,
    sample_systematic,
    shuffle_in_place,
    split_sizes,
    systematic_cdf_binary,
    systematic_cdf_linear,
)

__version__ = "0.1.0"
