"""Online submodular cover: online covering LP, exponential-clock separation and rounding with alterations."""
from .baselines import OptResult, brute_opt, competitive_report, marginal_bounds, wolsey_greedy
from .checks import CheckResult, check_structure, check_time_monotone
from .engine import (
    EngineConfig,
    OnlineSubmodularCover,
    RoundingState,
    TimeMonotonicityError,
    TimeStepResult,
    compute_rounds,
    greedy_alterations,
    sample_round,
)
from .extensions import (
    anchored_function,
    covering_extension_exact,
    derivative,
    linearization,
    marginal,
    multilinear_estimate,
    multilinear_exact,
    mutual_coverage,
)
from .functions import (
    ContractedFunction,
    CostVector,
    ExplicitTable,
    GroundSet,
    ModularFunction,
    PartitionMatroidRank,
    PrefixSum,
    SetFunction,
    WeightedCoverage,
)
from .instances import Instance, generate, load_instance, save_instance
from .lp import CoveringRow, OnlineCoveringLP, row_from_violation
from .separation import ViolationReport, clock_prefix_candidate, find_violated

__version__ = "0.1.0"
