"""Exact counting, closed-form moments and Monte Carlo checks for random
(hyper)graph statistics: copies of fixed subgraphs, perfect matchings,
Hamilton cycles and loose Hamilton cycles."""

from .count import CountResult, UnionCensus
from .errors import DegenerateDistributionError, InputError, ResourceLimitError, ZeroCountError
from .formulas import BoundReport, PatternStats
from .model import GraphInstance, ModelKind, ModelSpec
from .patterns import Pattern
from .stats import ExperimentReport, ExperimentSpec

__version__ = "0.1.0"
