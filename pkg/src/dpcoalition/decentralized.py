"""Selfish privacy choices and coalition stability.

Two stability notions are supported. ``"nash"``: no member gains by leaving
and no outsider gains by joining while members keep their current privacy
levels. ``"robust"``: same exit rule, but an outsider may only join if, once
everyone re-optimizes for the larger coalition, no one in it wants to leave.

Every predicate has a closed form (sums of ``(c_j^2/2)^(1/3)``) and a
definition-level counterpart that evaluates burdens directly; the latter is
slower and exists as an independent check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import (
    DEFAULT_TOL,
    BurdenReport,
    Coalition,
    PrivacyProfile,
    ProblemInstance,
    Tolerance,
    burden_report,
    player_burden,
)

CBRT2 = 2.0 ** (1.0 / 3.0)
KINDS = ("nash", "robust")
DEFAULT_MAX_N = 20


@dataclass(frozen=True)
class StabilityVerdict:
    kind: str
    stable: bool
    exit_slack: float
    """Smallest ``sigma^2 - burden`` over members; negative means someone leaves."""
    entry_witness: tuple | None
    """``(player, slack)`` for an outsider whose entry breaks stability."""
    boundary_flag: bool
    """Some condition was decided within tolerance."""


@dataclass(frozen=True)
class EscalationStep:
    coalition: Coalition
    threshold_T: float
    next_threshold: float

    @property
    def feasible(self) -> bool:
        """Whether ``[threshold_T, next_threshold)`` is a non-empty range of ``sigma^2``."""
        return self.threshold_T < self.next_threshold

    @property
    def sigma_interval(self) -> tuple:
        return np.sqrt(self.threshold_T), np.sqrt(self.next_threshold)


@dataclass(frozen=True)
class IdenticalCostReport:
    nash_intermediate_exists: bool
    robust_intermediate_size: int | None
    grand_stable: bool


def _check_kind(kind: str) -> None:
    if kind not in KINDS:
        raise ValueError(f"stability kind must be one of {KINDS}, got {kind!r}")


def _check_coalition(coalition: Coalition, instance: ProblemInstance) -> None:
    if len(coalition) < 2:
        raise ValueError("stability is defined for coalitions of size at least 2")
    coalition.check_fits(instance)


def best_response_epsilon(c_i, k: int, alpha: float):
    """Burden-minimizing privacy level ``(4 / (k**(2+alpha) * c_i))**(1/3)``.

    A member only controls their own noise term ``2/(k^2 eps^2)`` and their
    privacy cost, so the choice ignores everyone else's levels. Vectorized
    over ``c_i``.
    """
    if k < 2:
        raise ValueError("coalition size must be at least 2")
    return np.cbrt(4.0 / (float(k) ** (2.0 + alpha) * np.asarray(c_i, dtype=float)))


def best_response_profile(coalition: Coalition, instance: ProblemInstance) -> PrivacyProfile:
    members = np.array(coalition.members)
    eps = best_response_epsilon(instance.costs[members], len(coalition), instance.alpha)
    return PrivacyProfile.from_arrays(coalition.members, eps)


def decentral_variance(coalition: Coalition, instance: ProblemInstance) -> float:
    """Estimator variance when members choose their own levels (closed form)."""
    _check_coalition(coalition, instance)
    k = len(coalition)
    mean_c23 = np.sum(instance.costs[list(coalition)] ** (2.0 / 3.0)) / k
    return float((instance.sigma_sq + k ** (2.0 * (instance.alpha + 2.0) / 3.0) / CBRT2 * mean_c23) / k)


def decentral_social_cost(coalition: Coalition, instance: ProblemInstance) -> float:
    """Social cost when members choose their own levels (closed form)."""
    _check_coalition(coalition, instance)
    k = len(coalition)
    mean_c23 = np.sum(instance.costs[list(coalition)] ** (2.0 / 3.0)) / k
    gain = k * instance.sigma_sq - (k + 2) * k ** ((2.0 * instance.alpha + 1.0) / 3.0) / CBRT2 * mean_c23
    return float((instance.n + 1) * instance.sigma_sq - gain)


def decentralized_report(coalition: Coalition, instance: ProblemInstance) -> BurdenReport:
    """Burdens, variance and social cost at the members' best-response levels."""
    _check_coalition(coalition, instance)
    return burden_report(coalition, best_response_profile(coalition, instance), instance)


def entry_burdens(coalition: Coalition, instance: ProblemInstance) -> dict:
    """Burden each outsider would bear by joining alone, members' levels frozen."""
    _check_coalition(coalition, instance)
    frozen = best_response_profile(coalition, instance).levels
    k = len(coalition)
    out = {}
    for j in coalition.outsiders(instance.n):
        joined = Coalition(coalition.members + (j,))
        eps_j = best_response_epsilon(instance.costs[j], k + 1, instance.alpha)
        profile = PrivacyProfile({**frozen, j: float(eps_j)})
        out[j] = player_burden(j, joined, profile, instance)
    return out


def _exit_terms(coalition: Coalition, instance: ProblemInstance):
    a = instance.weights
    k = len(coalition)
    p = (2.0 * instance.alpha + 1.0) / 3.0
    members = list(coalition)
    total = float(np.sum(a[members]))
    blocker = total + 2.0 * float(np.max(a[members]))
    slack = instance.sigma_sq * (1.0 - 1.0 / k) - k ** (p - 1.0) * blocker
    return k, p, a, total, blocker, slack


def _closed_form(coalition, instance, tol, kind):
    _check_coalition(coalition, instance)
    k, p, a, total, blocker, exit_slack = _exit_terms(coalition, instance)
    s2 = instance.sigma_sq
    exit_ok, exit_edge = tol.geq((k - 1) / k**p, blocker / s2)
    outsiders = coalition.outsiders(instance.n)
    if not outsiders:
        return StabilityVerdict(kind, bool(exit_ok), exit_slack, None, bool(exit_edge))
    # costs are sorted, so the cheapest outsider is the binding entrant
    m = outsiders[0]
    if kind == "nash":
        q = (2.0 * instance.alpha + 4.0) / 3.0
        lhs = k * (k + 1.0)
        rhs = 3.0 * a[m] / s2 * (k + 1.0) ** q + total / s2 * k**q
    else:
        lhs = k / (k + 1.0) ** p
        rhs = (total + a[m] + 2.0 * max(a[m], float(np.max(a[list(coalition)])))) / s2
    blocked, entry_edge = tol.lt(lhs, rhs)
    witness = None if blocked else (m, float(rhs - lhs))
    return StabilityVerdict(kind, bool(exit_ok and blocked), exit_slack, witness,
                            bool(exit_edge or entry_edge))


def nash_stable_closed_form(coalition: Coalition, instance: ProblemInstance,
                            tol: Tolerance = DEFAULT_TOL) -> StabilityVerdict:
    """Nash stability from the closed-form exit and entry inequalities.

    Exit: ``(k-1)/k^((2a+1)/3) >= (sum w + 2 max w)/sigma^2`` over members,
    with ``w_j = (c_j^2/2)^(1/3)``. Entry is blocked when
    ``k(k+1) < 3 w_m/sigma^2 (k+1)^((2a+4)/3) + sum w/sigma^2 k^((2a+4)/3)``
    for the cheapest outsider ``m``. The grand coalition only needs the exit
    condition.
    """
    return _closed_form(coalition, instance, tol, "nash")


def robust_stable_closed_form(coalition: Coalition, instance: ProblemInstance,
                              tol: Tolerance = DEFAULT_TOL) -> StabilityVerdict:
    """Robust stability: Nash exit condition plus a veto-able entry condition.

    Entry by ``l`` is vetoed when ``k/(k+1)^((2a+1)/3)`` is strictly below
    ``(sum w + 2 max w)/sigma^2`` taken over ``S + {l}``; the minimum over
    outsiders is attained at the cheapest one.
    """
    return _closed_form(coalition, instance, tol, "robust")


def stability_by_definition(coalition: Coalition, instance: ProblemInstance, kind: str,
                            tol: Tolerance = DEFAULT_TOL) -> StabilityVerdict:
    """Evaluate stability straight from burdens; the reference for the closed forms."""
    _check_kind(kind)
    _check_coalition(coalition, instance)
    s2 = instance.sigma_sq
    report = decentralized_report(coalition, instance)
    members = np.array(coalition.members)
    member_burden = report.per_player_burden[members]
    exit_ok, exit_edge = tol.geq(s2, member_burden)
    edge = bool(np.any(exit_edge))
    witness = None
    if kind == "nash":
        for j, burden in entry_burdens(coalition, instance).items():
            blocked, e = tol.lt(s2, burden)
            edge |= bool(e)
            if not blocked and witness is None:
                witness = (j, float(s2 - burden))
    else:
        for j in coalition.outsiders(instance.n):
            joined = Coalition(coalition.members + (j,))
            burdens = decentralized_report(joined, instance).per_player_burden[list(joined)]
            blocked, e = tol.lt(s2, burdens)
            edge |= bool(np.any(e))
            if not np.any(blocked) and witness is None:
                witness = (j, float(s2 - burdens.max()))
    stable = bool(np.all(exit_ok)) and witness is None
    return StabilityVerdict(kind, stable, float(np.min(s2 - member_burden)), witness, edge)


def is_stable(coalition: Coalition, instance: ProblemInstance, kind: str,
              tol: Tolerance = DEFAULT_TOL) -> bool:
    _check_kind(kind)
    if kind == "nash":
        return nash_stable_closed_form(coalition, instance, tol).stable
    return robust_stable_closed_form(coalition, instance, tol).stable


def _stable_masks(instance: ProblemInstance, kind: str, tol: Tolerance,
                  chunk: int = 1 << 15) -> list:
    n = instance.n
    a = instance.weights
    s2 = instance.sigma_sq
    alpha = instance.alpha
    p = (2.0 * alpha + 1.0) / 3.0
    q = (2.0 * alpha + 4.0) / 3.0
    shifts = np.arange(n, dtype=np.int64)
    full = (1 << n) - 1
    found = []
    for start in range(0, full + 1, chunk):
        masks = np.arange(start, min(start + chunk, full + 1), dtype=np.int64)
        bits = (masks[:, None] >> shifts) & 1
        k = bits.sum(axis=1)
        keep = k >= 2
        masks, bits, k = masks[keep], bits[keep], k[keep].astype(float)
        if masks.size == 0:
            continue
        total = bits @ a
        top = a[n - 1 - np.argmax(bits[:, ::-1], axis=1)]
        exit_ok, _ = tol.geq((k - 1) / k**p, (total + 2.0 * top) / s2)
        grand = masks == full
        # index of the lowest unset bit = cheapest outsider; meaningless for the grand coalition
        m = np.argmin(bits, axis=1)
        a_m = a[m]
        if kind == "nash":
            blocked, _ = tol.lt(k * (k + 1), 3.0 * a_m / s2 * (k + 1) ** q + total / s2 * k**q)
        else:
            blocked, _ = tol.lt(k / (k + 1) ** p, (total + a_m + 2.0 * np.maximum(a_m, top)) / s2)
        stable = exit_ok & (grand | blocked)
        found.extend(int(x) for x in masks[stable])
    return found


def _order_key(coalition: Coalition):
    return len(coalition), coalition.members


def enumerate_equilibria(instance: ProblemInstance, kind: str, max_n: int = DEFAULT_MAX_N,
                         tol: Tolerance = DEFAULT_TOL) -> list:
    """Every stable coalition of size >= 2, by exhaustive search.

    Results are ordered by size, then lexicographically by members.

    Raises:
        ValueError: if ``instance.n > max_n``; use :func:`downward_closed_scan`
            for larger instances.
    """
    _check_kind(kind)
    if instance.n > max_n:
        raise ValueError(f"exhaustive search is capped at n={max_n} (got n={instance.n}); "
                         "use downward_closed_scan for larger instances")
    if instance.n < 2:
        return []
    found = [Coalition.from_mask(m) for m in _stable_masks(instance, kind, tol)]
    return sorted(found, key=_order_key)


def downward_closed_scan(instance: ProblemInstance, kind: str,
                         tol: Tolerance = DEFAULT_TOL) -> list:
    """Stable coalitions among ``S_2..S_n`` (the ``k`` cheapest players).

    With well-separated costs (``c_i >= 2 c_{i-1}``) every Nash-stable
    coalition is of this form, so the scan is complete. For robust stability
    the scan is valid on any instance and its largest result has the maximum
    robust equilibrium size.
    """
    _check_kind(kind)
    if kind == "nash" and not instance.is_well_separated():
        raise ValueError("completeness guarantee requires well-separated costs")
    return [Coalition.downward_closed(k) for k in range(2, instance.n + 1)
            if is_stable(Coalition.downward_closed(k), instance, kind, tol)]


def grand_coalition_sufficient(instance: ProblemInstance, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Whether all ``n`` players form a stable coalition (either notion).

    With no outsiders only the exit condition
    ``sigma^2 (n-1)/n^((2a+1)/3) >= sum w + 2 w_n`` matters.
    """
    n = instance.n
    if n < 2:
        return False
    a = instance.weights
    p = (2.0 * instance.alpha + 1.0) / 3.0
    ok, _ = tol.geq(instance.sigma_sq * (n - 1) / n**p, float(np.sum(a)) + 2.0 * a[-1])
    return bool(ok)


def grand_coalition_size_bounds(instance: ProblemInstance) -> tuple:
    """Sufficient player-count range ``(lo, hi)`` for a stable grand coalition.

    Uses only ``c_n``; ``hi`` is ``inf`` when ``alpha < -1/2`` and the bound
    is undefined (``None``) at ``alpha = -1/2``. Diagnostic only:
    :func:`grand_coalition_sufficient` is exact.
    """
    p = (2.0 * instance.alpha + 1.0) / 3.0
    ratio = instance.sigma_sq / (4.0 * instance.weights[-1])
    if p > 0:
        return 2.0, ratio ** (1.0 / p)
    if p < 0:
        return max(2.0, ratio ** (1.0 / p)), np.inf
    return None


def _blocker(a: np.ndarray, members) -> float:
    w = a[list(members)]
    return float(np.sum(w) + 2.0 * np.max(w))


def robust_escalation_sequence(start: Coalition, instance: ProblemInstance) -> list:
    """Chain of coalitions grown one cheapest-to-admit player at a time.

    Step ``i`` holds ``S_i`` and ``T_i``; ``S_i`` is robust-stable exactly for
    ``sigma^2`` in ``[T_i, T_{i+1})`` and the last step is unbounded above.
    Thresholds need not increase, so some steps may be infeasible; the
    feasible ones still cover every ``sigma^2 >= T_0``. The instance's own
    ``sigma_sq`` is ignored.

    Raises:
        ValueError: if ``start`` is not robust-stable for any ``sigma^2``.
    """
    _check_coalition(start, instance)
    a = instance.weights
    p = (2.0 * instance.alpha + 1.0) / 3.0
    chain = [start]
    while len(chain[-1]) < instance.n:
        current = chain[-1]
        outsiders = current.outsiders(instance.n)
        scores = [_blocker(a, current.members + (l,)) for l in outsiders]
        chain.append(Coalition(current.members + (outsiders[int(np.argmin(scores))],)))
    thresholds = [_blocker(a, s) * len(s) ** p / (len(s) - 1) for s in chain] + [np.inf]
    steps = [EscalationStep(s, thresholds[i], thresholds[i + 1]) for i, s in enumerate(chain)]
    if not steps[0].feasible:
        raise ValueError(f"{start!r} is not robust-stable at any sigma")
    return steps


def _identical_cost_conditions(r: float, alpha: float, ks: np.ndarray, tol: Tolerance):
    p = (2.0 * alpha + 1.0) / 3.0
    q = (2.0 * alpha + 4.0) / 3.0
    exit_ok, _ = tol.geq(r, (ks + 2.0) / (ks - 1.0) * ks**p)
    robust_blocked, _ = tol.lt(r, (ks + 3.0) / ks * (ks + 1.0) ** p)
    nash_blocked, _ = tol.lt(ks * (ks + 1.0), 3.0 / r * (ks + 1.0) ** q + ks / r * ks**q)
    return exit_ok & nash_blocked, exit_ok & robust_blocked


def robust_intermediate_sizes(c: float, sigma_sq: float, alpha: float, n: int,
                              tol: Tolerance = DEFAULT_TOL) -> list:
    """All ``k`` in ``2..n-1`` admitting a robust equilibrium when every cost is ``c``.

    With ``r = 2^(1/3) sigma^2 / c^(2/3)`` the condition is
    ``(k+2)/(k-1) k^p <= r < (k+3)/k (k+1)^p``, ``p = (2 alpha + 1)/3``.
    """
    ks = np.arange(2, n, dtype=float)
    if ks.size == 0:
        return []
    r = CBRT2 * sigma_sq / c ** (2.0 / 3.0)
    _, robust = _identical_cost_conditions(r, alpha, ks, tol)
    return [int(k) for k in ks[robust]]


def identical_cost_analysis(c: float, sigma_sq: float, alpha: float, n: int,
                            tol: Tolerance = DEFAULT_TOL) -> IdenticalCostReport:
    """Equilibrium structure when all ``n`` players share the cost ``c``."""
    if c <= 0 or n < 2:
        raise ValueError("need c > 0 and n >= 2")
    ks = np.arange(2, n, dtype=float)
    r = CBRT2 * sigma_sq / c ** (2.0 / 3.0)
    nash = False
    if ks.size:
        nash_ok, _ = _identical_cost_conditions(r, alpha, ks, tol)
        nash = bool(np.any(nash_ok))
    sizes = robust_intermediate_sizes(c, sigma_sq, alpha, n, tol)
    if len(sizes) > 1:
        raise RuntimeError(f"several intermediate robust sizes {sizes}; intervals should be disjoint")
    grand = grand_coalition_sufficient(ProblemInstance.identical(n, c, sigma_sq, alpha), tol)
    return IdenticalCostReport(nash, sizes[0] if sizes else None, grand)
