"""
General-source models, exact enumeration, seeded sampling and self-information statistics
"""
from overflow_core.sources.base import DEFAULT_ENUMERATION_BUDGET, SourceModel, check_budget
from overflow_core.sources.models import (
    IIDSource,
    MarkovSource,
    MixtureSource,
    load_source_model,
    source_from_mapping,
)
from overflow_core.sources.statistics import (
    SelfInfoDistribution,
    SelfInfoStats,
    enumerate_strings,
    probability,
    sample,
    self_info_stats,
    self_information_distribution,
)

__all__ = [
    "DEFAULT_ENUMERATION_BUDGET",
    "SourceModel",
    "IIDSource",
    "MarkovSource",
    "MixtureSource",
    "SelfInfoDistribution",
    "SelfInfoStats",
    "check_budget",
    "enumerate_strings",
    "load_source_model",
    "probability",
    "sample",
    "self_info_stats",
    "self_information_distribution",
    "source_from_mapping",
]
