"""Social-cost-optimal coalition chosen by a central designer."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import Coalition, PrivacyProfile, ProblemInstance

CBRT2 = 2.0 ** (1.0 / 3.0)


@dataclass(frozen=True)
class CentralizedSolution:
    k_star: int
    coalition: Coalition
    profile: PrivacyProfile
    social_cost: float
    variance: float | None
    """``None`` when no coalition forms."""


@dataclass(frozen=True)
class RegimeLabel:
    regime: str
    predicted_var_exponent: float
    predicted_sc_exponent: float


def central_epsilon(c_i, k: int, alpha: float):
    """Designer's privacy level ``(4 / (k**(1+alpha) * c_i))**(1/3)``.

    Minimizes ``2/(k eps^2) + k^alpha c_i eps``, player ``i``'s share of the
    social cost. Vectorized over ``c_i``.
    """
    if k < 2:
        raise ValueError("coalition size must be at least 2")
    return np.cbrt(4.0 / (float(k) ** (1.0 + alpha) * np.asarray(c_i, dtype=float)))


def central_profile(instance: ProblemInstance, k: int) -> PrivacyProfile:
    members = range(k)
    return PrivacyProfile.from_arrays(members, central_epsilon(instance.costs[:k], k, instance.alpha))


def _check_size(instance: ProblemInstance, k: int) -> None:
    if not 2 <= k <= instance.n:
        raise ValueError(f"coalition size {k} outside 2..{instance.n}")


def _mean_c23(instance: ProblemInstance, k: int) -> float:
    return float(np.sum(instance.costs[:k] ** (2.0 / 3.0)) / k)


def central_variance_at_size(instance: ProblemInstance, k: int) -> float:
    """Estimator variance of the ``k`` cheapest players at the designer's levels."""
    _check_size(instance, k)
    growth = float(k) ** (2.0 * (instance.alpha + 1.0) / 3.0)
    return (instance.sigma_sq + growth / CBRT2 * _mean_c23(instance, k)) / k


def central_social_cost_at_size(instance: ProblemInstance, k: int) -> float:
    """Best achievable social cost over coalitions of size ``k``."""
    _check_size(instance, k)
    growth = float(k) ** (2.0 * (instance.alpha + 1.0) / 3.0)
    gain = k * instance.sigma_sq - 3.0 / CBRT2 * growth * _mean_c23(instance, k)
    return (instance.n + 1) * instance.sigma_sq - gain


def central_social_cost_curve(instance: ProblemInstance) -> np.ndarray:
    """``central_social_cost_at_size`` for every ``k`` in ``2..n`` at once."""
    n = instance.n
    if n < 2:
        return np.empty(0)
    k = np.arange(2, n + 1, dtype=float)
    mean_c23 = np.cumsum(instance.costs ** (2.0 / 3.0))[1:] / k
    growth = k ** (2.0 * (instance.alpha + 1.0) / 3.0)
    return (n + 1) * instance.sigma_sq - (k * instance.sigma_sq - 3.0 / CBRT2 * growth * mean_c23)


def solve_centralized(instance: ProblemInstance) -> CentralizedSolution:
    """Optimal coalition size by exhaustive scan over ``k = 2..n``.

    Ties go to the smallest ``k``. The empty coalition is chosen when no size
    beats ``n * sigma^2``.
    """
    empty_cost = instance.n * instance.sigma_sq
    curve = central_social_cost_curve(instance)
    if curve.size == 0 or curve.min() > empty_cost:
        return CentralizedSolution(0, Coalition(), PrivacyProfile({}), empty_cost, None)
    k = int(np.argmin(curve)) + 2
    return CentralizedSolution(
        k_star=k,
        coalition=Coalition.downward_closed(k),
        profile=central_profile(instance, k),
        social_cost=float(curve[k - 2]),
        variance=central_variance_at_size(instance, k),
    )


def classify_regime_centralized(alpha: float) -> RegimeLabel:
    """Large-``n`` behaviour of the centralized optimum as a function of ``alpha``."""
    if not -1.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [-1, 1]")
    if alpha < 0.5:
        return RegimeLabel("grand_coalition", (2 * alpha - 1) / 3, 2 * (alpha + 1) / 3)
    if alpha == 0.5:
        return RegimeLabel("boundary_half", 0.0, 1.0)
    return RegimeLabel("constant_or_empty", 0.0, 1.0)
