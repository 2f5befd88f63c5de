"""Stochastic linear bandits with diverse user preferences: instances,
the W-UCB policy and baselines, regret simulation and bound evaluators."""

from .bounds import (
    BoundInputs,
    alt_environment,
    bound_report,
    kl_product,
    lemma2_tail,
    lemma2_threshold,
    lemma33_rhs,
    lemma34_rhs,
    theorem1_leading,
    theorem2_lower,
)
from .env import (
    InstanceSummary,
    PreferenceModel,
    ProblemInstance,
    build_synthetic,
    optimal_arm,
    summarize,
)
from .policy import WucbState, wucb_select, wucb_update
from .sim import run_experiment, run_path, verify_counters

__version__ = "0.1.0"
