"""Price of Stability against the centralized optimum."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .centralized import CentralizedSolution, central_variance_at_size, solve_centralized
from .decentralized import (
    DEFAULT_MAX_N,
    decentral_social_cost,
    decentral_variance,
    downward_closed_scan,
    enumerate_equilibria,
    grand_coalition_sufficient,
    robust_intermediate_sizes,
    _check_kind,
)
from .fitting import PowerFit, fit_power_law
from .model import DEFAULT_TOL, Coalition, ProblemInstance, Tolerance

CBRT2 = 2.0 ** (1.0 / 3.0)


@dataclass(frozen=True)
class StableOptimum:
    coalition: Coalition
    social_cost: float
    variance: float
    method: str


@dataclass(frozen=True)
class PosReport:
    pos_sc: float
    pos_var: float
    decentral_coalition: Coalition
    central_solution: CentralizedSolution
    bound_high_alpha: float | None


def _candidates(instance: ProblemInstance, kind: str, max_n: int, tol: Tolerance):
    if instance.n <= max_n:
        return enumerate_equilibria(instance, kind, max_n=max_n, tol=tol), "enumeration"
    if instance.is_identical_cost():
        # all size-k subsets are interchangeable, so S_k stands for the whole class
        found = []
        if kind == "robust":
            found += [Coalition.downward_closed(k) for k in robust_intermediate_sizes(
                float(instance.costs[0]), instance.sigma_sq, instance.alpha, instance.n, tol)]
        if grand_coalition_sufficient(instance, tol):
            found.append(Coalition.downward_closed(instance.n))
        return found, "identical_cost"
    if kind == "nash" and instance.is_well_separated():
        return downward_closed_scan(instance, kind, tol), "well_separated_scan"
    raise ValueError(f"no exact method for n={instance.n} > {max_n}: costs are neither identical "
                     "nor (for nash) well separated")


def optimal_stable_coalition(instance: ProblemInstance, kind: str, max_n: int = DEFAULT_MAX_N,
                             tol: Tolerance = DEFAULT_TOL, objective: str = "sc") -> StableOptimum:
    """Lowest-social-cost stable coalition, or the empty coalition if none is stable.

    Exhaustive up to ``max_n`` players; beyond that only identical-cost
    instances, and well-separated instances under Nash stability, are
    solved. ``objective="var"`` selects the lowest-variance stable coalition
    instead (diagnostic).

    Raises:
        ValueError: if the instance is too large for every exact method.
    """
    _check_kind(kind)
    if objective not in ("sc", "var"):
        raise ValueError("objective must be 'sc' or 'var'")
    found, method = _candidates(instance, kind, max_n, tol)
    if not found:
        return StableOptimum(Coalition(), instance.n * instance.sigma_sq, instance.sigma_sq, method)
    scored = [(decentral_social_cost(s, instance), decentral_variance(s, instance), s) for s in found]
    pick = 0 if objective == "sc" else 1
    best = min(scored, key=lambda t: (t[pick], len(t[2]), t[2].members))
    return StableOptimum(best[2], best[0], best[1], method)


def pos_bound_high_alpha(instance: ProblemInstance) -> float:
    """Upper bound ``max(4/3, 2^(1/3) sigma^2 / (3 c_min^(2/3)))`` on PoS(SC).

    Raises:
        ValueError: unless ``alpha > 1/2``.
    """
    if instance.alpha <= 0.5:
        raise ValueError("bound applies only for alpha > 1/2")
    return max(4.0 / 3.0, CBRT2 * instance.sigma_sq / (3.0 * float(instance.costs[0]) ** (2.0 / 3.0)))


def price_of_stability(instance: ProblemInstance, kind: str, max_n: int = DEFAULT_MAX_N,
                       tol: Tolerance = DEFAULT_TOL, variance_objective: str = "sc") -> PosReport:
    """Ratios of decentralized to centralized social cost and variance.

    Both settings are compared at their social-cost-optimal coalitions; an
    empty coalition counts as variance ``sigma^2``. ``variance_objective="var"``
    picks each side's lowest-variance coalition for ``pos_var`` instead.
    """
    central = solve_centralized(instance)
    decentral = optimal_stable_coalition(instance, kind, max_n=max_n, tol=tol)
    central_var = instance.sigma_sq if central.variance is None else central.variance
    decentral_var = decentral.variance
    if variance_objective == "var":
        decentral_var = optimal_stable_coalition(instance, kind, max_n, tol, objective="var").variance
        central_var = min(central_var, _best_central_variance(instance))
    elif variance_objective != "sc":
        raise ValueError("variance_objective must be 'sc' or 'var'")
    bound = pos_bound_high_alpha(instance) if instance.alpha > 0.5 else None
    return PosReport(
        pos_sc=decentral.social_cost / central.social_cost,
        pos_var=decentral_var / central_var,
        decentral_coalition=decentral.coalition,
        central_solution=central,
        bound_high_alpha=bound,
    )


def _best_central_variance(instance: ProblemInstance) -> float:
    best = instance.sigma_sq
    for k in range(2, instance.n + 1):
        best = min(best, central_variance_at_size(instance, k))
    return best


def regime_cost_ratio(alpha: float, n_min: int) -> float:
    """A ``(c^2/2)^(1/3) / sigma^2`` ratio that puts identical-cost instances of
    size ``n_min`` and above in their large-``n`` regime.

    Below ``alpha = 1/2`` the central grand coalition must already be optimal
    at ``n_min``; at ``alpha < -1/2`` the decentral grand coalition must also
    be stable there. A margin of 10% is kept from both limits.
    """
    growth = n_min ** (2.0 * (alpha + 1.0) / 3.0)
    limit = (n_min - 1) / (3.0 * growth)
    if alpha < -0.5:
        p = (2.0 * alpha + 1.0) / 3.0
        limit = min(limit, (n_min - 1) / (n_min**p * (n_min + 2)))
    return 0.9 * limit if alpha < 0.5 else 1.0


def pos_variance_exponent_check(alpha: float, n_grid, c: float | None = None,
                                sigma_sq: float = 1.0, kind: str = "nash",
                                tol: Tolerance = DEFAULT_TOL) -> PowerFit:
    """Log-log fit of PoS(Var) against ``n`` on identical-cost instances.

    ``c`` defaults to the cost given by :func:`regime_cost_ratio` at the
    smallest grid size. Expected slopes: 2/3 for ``alpha <= -1/2``,
    ``(1 - 2 alpha)/3`` up to ``alpha = 1/2`` and 0 above.

    Raises:
        ValueError: if the grid has fewer than two distinct sizes.
    """
    ns = sorted({int(n) for n in n_grid})
    if len(ns) < 2 or ns[0] < 2:
        raise ValueError("need at least two distinct grid sizes, all >= 2")
    if c is None:
        w = regime_cost_ratio(alpha, ns[0]) * sigma_sq
        c = float(np.sqrt(2.0 * w**3))
    ratios = [price_of_stability(ProblemInstance.identical(n, c, sigma_sq, alpha), kind,
                                 max_n=0, tol=tol).pos_var for n in ns]
    return fit_power_law(ns, ratios)
