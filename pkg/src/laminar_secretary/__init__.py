"""Online selection under laminar capacity constraints (KickNext rule)
with exact and Monte Carlo verification of its competitive-ratio analysis."""

from .model import (
    Element,
    FamilyNode,
    InstanceError,
    LaminarInstance,
    chain,
    dump_instance,
    load_instance,
    make_instance,
    normalize_family,
    order_key,
)
from .matroid import (
    RankedOptimum,
    all_reference_sets,
    brank,
    brute_force_opt,
    greedy_opt,
    is_independent,
    node_usage,
)
from .kicknext import (
    BreakRecord,
    RunConfig,
    RunResult,
    TraceEvent,
    Trial,
    make_trial,
    qualifies,
    reference_sets,
    run_kicknext,
    trace_csv,
)
from .theory import (
    TheoryParams,
    allkicked_bound,
    best_p,
    g_exact,
    g_refined_bound,
    g_weak_bound,
    geometric_sum,
    ratio_lower_bound,
    rel_ent,
    theory_params,
    weighted_penalty,
    weighted_penalty_telescoped,
)
from .experiments import (
    AllKickedRow,
    ExperimentReport,
    LemmaCheck,
    QualifyingProbability,
    RatioEstimate,
    allkicked_frequency,
    derive_seed,
    exact_expectation,
    exact_ratio,
    monte_carlo_ratio,
    qualifying_joint_probability,
    verify_lemmas,
)
from .generators import GenSpec, generate

__all__ = [name for name in dir() if not name.startswith("_")]
