"""Capacity-distortion regions of bistatic ISAC broadcast channels.

The package evaluates the rate-distortion tuples of the blind, partial and
full decode-and-estimate strategies (plus a genie-aided outer bound and the
degraded-channel region), optimizes their frontiers, and validates the
results against closed forms and Monte Carlo sampling.
"""

from .channel import ChannelModel, DegradednessVerdict, check_degraded, dump_channel, load_channel, validate_channel
from .errors import IsacError
from .estimators import EstimatorTable, brute_force_best_estimator, estimator_uz, estimator_xz, estimator_z, expected_distortion
from .examples import make_example1, make_example2
from .frontier import Frontier, FrontierPoint, SearchConfig, cardinality_sweep, frontier_family, optimize_frontier, pareto_extract, parse_grid
from .montecarlo import SampleConfig, empirical_distortion, empirical_mutual_information, sample_joint
from .prob import JointPmf, assemble_joint, entropy, marginalize, mutual_information, validate_pmf
from .regions import (
    JointInputDistribution,
    RegionPoint,
    evaluate,
    evaluate_blind,
    evaluate_degraded,
    evaluate_full,
    evaluate_outer,
    evaluate_partial,
    region_equivalence_check,
    time_sharing_baselines,
)

__all__ = [
    "ChannelModel",
    "DegradednessVerdict",
    "EstimatorTable",
    "Frontier",
    "FrontierPoint",
    "IsacError",
    "JointInputDistribution",
    "JointPmf",
    "RegionPoint",
    "SampleConfig",
    "SearchConfig",
    "assemble_joint",
    "brute_force_best_estimator",
    "cardinality_sweep",
    "check_degraded",
    "dump_channel",
    "empirical_distortion",
    "empirical_mutual_information",
    "entropy",
    "estimator_uz",
    "estimator_xz",
    "estimator_z",
    "evaluate",
    "evaluate_blind",
    "evaluate_degraded",
    "evaluate_full",
    "evaluate_outer",
    "evaluate_partial",
    "expected_distortion",
    "frontier_family",
    "load_channel",
    "make_example1",
    "make_example2",
    "marginalize",
    "mutual_information",
    "optimize_frontier",
    "pareto_extract",
    "parse_grid",
    "region_equivalence_check",
    "sample_joint",
    "time_sharing_baselines",
    "validate_channel",
    "validate_pmf",
]
