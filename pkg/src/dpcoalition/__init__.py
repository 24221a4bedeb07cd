"""Coalition formation for privacy-preserving mean estimation.

Players pool noisy copies of their data to estimate a shared mean. Each
trades the variance reduction of a larger pool against a privacy cost that
scales as ``k**alpha`` with coalition size ``k``. This package computes the
centrally optimal coalition, the stable coalitions that form without
coordination, and the efficiency gap between the two.
"""

from .centralized import (
    CentralizedSolution,
    RegimeLabel,
    central_epsilon,
    central_social_cost_at_size,
    central_variance_at_size,
    classify_regime_centralized,
    solve_centralized,
)
from .decentralized import (
    EscalationStep,
    IdenticalCostReport,
    StabilityVerdict,
    best_response_epsilon,
    best_response_profile,
    decentral_social_cost,
    decentral_variance,
    decentralized_report,
    downward_closed_scan,
    enumerate_equilibria,
    grand_coalition_sufficient,
    identical_cost_analysis,
    is_stable,
    nash_stable_closed_form,
    robust_escalation_sequence,
    robust_intermediate_sizes,
    robust_stable_closed_form,
    stability_by_definition,
)
from .efficiency import (
    PosReport,
    StableOptimum,
    optimal_stable_coalition,
    pos_bound_high_alpha,
    pos_variance_exponent_check,
    price_of_stability,
    regime_cost_ratio,
)
from .experiments import (
    MonteCarloConfig,
    MonteCarloResult,
    ScalingRow,
    SweepRow,
    monte_carlo_variance,
    random_instance,
    sweep_scaling,
    sweep_sigma,
    write_csv,
)
from .fitting import PowerFit, fit_power_law
from .model import (
    DEFAULT_TOL,
    BurdenReport,
    Coalition,
    InstanceError,
    PrivacyProfile,
    ProblemInstance,
    Tolerance,
    burden_report,
    estimator_variance,
    laplace_sample,
    player_burden,
    social_cost,
)

__version__ = "0.1.0"
