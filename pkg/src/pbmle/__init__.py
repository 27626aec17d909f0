"""Exact participatory-budgeting rules, noise models and maximum-likelihood checks."""

from .errors import (
    BranchLimitError,
    EmptyProfileError,
    EnumerationLimitError,
    InfeasibleAllocationError,
    PBError,
    StructuralError,
    UndefinedDistributionError,
)
from .model import (
    Allocation,
    Instance,
    Profile,
    Project,
    RuleOutcome,
    enumerate_allocations,
    enumerate_ballots,
    is_exhaustive,
    is_unit_cost,
    total_cost,
)
from .welfare import SCORE_KINDS, Score, approval_score, argmax_rule, greedy_cost_approval, score
from .proportional import SatisfactionFunction, mes, method_of_equal_shares, sequential_phragmen
from .noise import (
    MODEL_KINDS,
    ballot_probability,
    likelihood,
    normalisation_factor,
    sample_ballot,
    sample_profile,
)
from .mle import TRUTH_SPACES, mle, mle_matches_rule
from .rules import RULE_NAMES, get_rule
from .checks import check_monotonic_conditions, check_weak_reinforcement, fuzz_weak_reinforcement
from .fixtures import builtin_fixtures, verify_counterexamples
from .pabulib import PbParseError, parse_pb, read_pb, to_instance_profile, write_pb
from .experiments import ExperimentConfig, emit_csv, run_recovery

__version__ = "0.1.0"
