"""Weighted log-spacing estimators of the extreme value index."""

from .estimators import (
    EstimateResult,
    EstimatorSpec,
    SortedSample,
    confidence_interval,
    dekkers_moment,
    double_hill_boundary,
    double_hill_optimal,
    hill,
    marginal_estimate,
)
from .models import ModelSpec, derive_stream, generate_sample
from .weights import EstimatorParams, WeightFunction, classify_regime

__version__ = "0.1.0"
