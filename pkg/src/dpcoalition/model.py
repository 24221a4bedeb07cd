"""Primitive quantities of the private data-sharing game.

Players are indexed ``0..n-1`` in ascending order of privacy cost; the
original input positions are kept on :attr:`ProblemInstance.labels`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping

import numpy as np


class InstanceError(ValueError):
    """Invalid problem instance. ``code`` names the offending field."""

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


@dataclass(frozen=True)
class Tolerance:
    """Comparison tolerance for the (non-)strict inequalities of the model."""

    abs_tol: float = 1e-12
    rel_tol: float = 1e-9

    def __post_init__(self):
        for name in ("abs_tol", "rel_tol"):
            value = getattr(self, name)
            if not np.isfinite(value) or value < 0:
                raise ValueError(f"{name} must be finite and nonnegative, got {value!r}")

    def geq(self, a, b):
        """Return ``(a >= b, boundary)`` with slack ``abs_tol + rel_tol*|b|``.

        Works elementwise on arrays.
        """
        margin = self.abs_tol + self.rel_tol * np.abs(b)
        diff = np.asarray(a) - np.asarray(b)
        return diff >= -margin, np.abs(diff) <= margin

    def lt(self, a, b):
        """Return ``(a < b, boundary)``; the gap must exceed ``abs_tol + rel_tol*|a|``."""
        margin = self.abs_tol + self.rel_tol * np.abs(a)
        diff = np.asarray(b) - np.asarray(a)
        return diff > margin, np.abs(diff) <= margin


DEFAULT_TOL = Tolerance()


@dataclass(frozen=True, eq=False)
class ProblemInstance:
    """Game parameters: privacy costs, data variance and cost-scaling exponent.

    Costs are sorted ascending on construction. ``labels[i]`` is the position
    of player ``i`` in the cost vector as given.
    """

    costs: np.ndarray
    sigma_sq: float
    alpha: float
    labels: tuple = field(default=None)

    def __post_init__(self):
        raw = np.asarray(self.costs, dtype=float).ravel()
        if raw.size < 1:
            raise InstanceError("empty_costs", "at least one player is required")
        if not np.all(np.isfinite(raw)) or np.any(raw <= 0):
            raise InstanceError("non_positive_cost", "every cost must be a positive finite number")
        if not np.isfinite(self.sigma_sq) or self.sigma_sq <= 0:
            raise InstanceError("sigma_sq_nonpositive", f"sigma_sq must be > 0, got {self.sigma_sq!r}")
        if not np.isfinite(self.alpha) or not -1.0 <= self.alpha <= 1.0:
            raise InstanceError("alpha_out_of_range", f"alpha must lie in [-1, 1], got {self.alpha!r}")
        order = np.argsort(raw, kind="stable")
        if self.labels is None:
            labels = tuple(int(i) for i in order)
        else:
            if len(self.labels) != raw.size:
                raise InstanceError("labels_mismatch", "labels must have one entry per cost")
            labels = tuple(self.labels[i] for i in order)
        costs = raw[order]
        costs.setflags(write=False)
        object.__setattr__(self, "costs", costs)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "sigma_sq", float(self.sigma_sq))
        object.__setattr__(self, "alpha", float(self.alpha))

    @property
    def n(self) -> int:
        return int(self.costs.size)

    @property
    def weights(self) -> np.ndarray:
        """Per-player ``(c_i**2 / 2)**(1/3)``, the unit in which stability is decided."""
        return np.cbrt(self.costs**2 / 2.0)

    def with_sigma_sq(self, sigma_sq: float) -> "ProblemInstance":
        return ProblemInstance(self.costs, sigma_sq, self.alpha, labels=self.labels)

    def is_identical_cost(self, rel_tol: float = 1e-12) -> bool:
        return bool(self.costs[-1] - self.costs[0] <= rel_tol * self.costs[-1])

    def is_well_separated(self) -> bool:
        return bool(np.all(self.costs[1:] >= 2.0 * self.costs[:-1]))

    def __eq__(self, other):
        if not isinstance(other, ProblemInstance):
            return NotImplemented
        return (np.array_equal(self.costs, other.costs) and self.sigma_sq == other.sigma_sq
                and self.alpha == other.alpha)

    def __hash__(self):
        return hash((self.costs.tobytes(), self.sigma_sq, self.alpha))

    @classmethod
    def identical(cls, n: int, c: float, sigma_sq: float, alpha: float) -> "ProblemInstance":
        return cls(np.full(n, float(c)), sigma_sq, alpha)


@dataclass(frozen=True, order=True)
class Coalition:
    """A set of player indices that is either empty or has at least two members."""

    members: tuple = ()

    def __post_init__(self):
        members = tuple(sorted(int(m) for m in self.members))
        if len(set(members)) != len(members):
            raise ValueError(f"duplicate members in {members}")
        if any(m < 0 for m in members):
            raise ValueError("member indices must be nonnegative")
        if len(members) == 1:
            raise ValueError("a coalition has size 0 or at least 2")
        object.__setattr__(self, "members", members)

    @classmethod
    def of(cls, *members: int) -> "Coalition":
        return cls(tuple(members))

    @classmethod
    def downward_closed(cls, k: int) -> "Coalition":
        """The ``k`` cheapest players."""
        return cls(tuple(range(k)))

    @classmethod
    def from_mask(cls, mask: int) -> "Coalition":
        return cls(tuple(i for i in range(mask.bit_length()) if mask >> i & 1))

    @property
    def mask(self) -> int:
        return sum(1 << m for m in self.members)

    @property
    def size(self) -> int:
        return len(self.members)

    def __len__(self):
        return len(self.members)

    def __iter__(self) -> Iterator[int]:
        return iter(self.members)

    def __contains__(self, i) -> bool:
        return i in self.members

    def __bool__(self):
        return bool(self.members)

    def outsiders(self, n: int) -> tuple:
        return tuple(i for i in range(n) if i not in self.members)

    def check_fits(self, instance: ProblemInstance) -> None:
        if self.members and self.members[-1] >= instance.n:
            raise ValueError(f"coalition {self.members} references a player outside 0..{instance.n - 1}")

    def __repr__(self):
        return f"Coalition{set(self.members) if self.members else '{}'}"


@dataclass(frozen=True)
class PrivacyProfile:
    """Privacy level ``epsilon > 0`` for each coalition member."""

    levels: Mapping[int, float]

    def __post_init__(self):
        levels = {int(i): float(e) for i, e in dict(self.levels).items()}
        for i, eps in levels.items():
            if not np.isfinite(eps) or eps <= 0:
                raise ValueError(f"privacy level of player {i} must be positive, got {eps!r}")
        object.__setattr__(self, "levels", levels)

    @classmethod
    def from_arrays(cls, members: Iterable[int], eps: Iterable[float]) -> "PrivacyProfile":
        return cls(dict(zip(members, eps)))

    def __getitem__(self, i: int) -> float:
        return self.levels[i]

    def array(self, coalition: Coalition) -> np.ndarray:
        """Levels of ``coalition``'s members, in member order."""
        if set(self.levels) != set(coalition.members):
            raise ValueError("privacy profile does not match the coalition's members")
        return np.array([self.levels[i] for i in coalition.members])

    def scaled(self, factor: float) -> "PrivacyProfile":
        return PrivacyProfile({i: e * factor for i, e in self.levels.items()})


@dataclass(frozen=True)
class BurdenReport:
    per_player_burden: np.ndarray
    variance: float
    social_cost: float


def privacy_scaling(instance: ProblemInstance, k: int) -> float:
    """Cost multiplier ``k**alpha`` for a coalition of size ``k``."""
    if k < 1:
        raise ValueError("coalition size must be at least 1")
    return float(k) ** instance.alpha


def estimator_variance(coalition: Coalition, profile: PrivacyProfile,
                       instance: ProblemInstance) -> float:
    """Variance of the pooled noisy mean over ``coalition``.

    ``sigma^2/k + (2/k^2) * sum(1/eps_i^2)``; Laplace noise of scale
    ``1/eps`` contributes variance ``2/eps^2``.
    """
    if not coalition:
        raise ValueError("no estimator for empty coalition")
    eps = profile.array(coalition)
    k = len(coalition)
    return instance.sigma_sq / k + 2.0 / k**2 * float(np.sum(1.0 / eps**2))


def player_burden(i: int, coalition: Coalition, profile: PrivacyProfile | None,
                  instance: ProblemInstance) -> float:
    if i not in coalition:
        return instance.sigma_sq
    k = len(coalition)
    return (estimator_variance(coalition, profile, instance)
            + instance.costs[i] * privacy_scaling(instance, k) * profile[i])


def burden_report(coalition: Coalition, profile: PrivacyProfile | None,
                  instance: ProblemInstance) -> BurdenReport:
    """All ``n`` burdens plus the coalition's variance and the social cost."""
    coalition.check_fits(instance)
    burdens = np.full(instance.n, instance.sigma_sq)
    if not coalition:
        return BurdenReport(burdens, instance.sigma_sq, instance.n * instance.sigma_sq)
    var = estimator_variance(coalition, profile, instance)
    members = np.array(coalition.members)
    eps = profile.array(coalition)
    burdens[members] = var + instance.costs[members] * privacy_scaling(instance, len(coalition)) * eps
    return BurdenReport(burdens, var, float(np.sum(burdens)))


def social_cost(coalition: Coalition, profile: PrivacyProfile | None,
                instance: ProblemInstance) -> float:
    """Sum of all ``n`` burdens; ``n * sigma^2`` for the empty coalition."""
    return burden_report(coalition, profile, instance).social_cost


def laplace_sample(scale, uniform_draw):
    """Inverse-CDF transform of ``u`` in (-1/2, 1/2) to a Laplace(0, scale) draw.

    Vectorized over ``uniform_draw``.
    """
    if np.any(np.asarray(scale) <= 0):
        raise ValueError("Laplace scale must be positive")
    u = np.asarray(uniform_draw, dtype=float)
    if np.any(np.abs(u) >= 0.5):
        raise ValueError("uniform draw must lie strictly inside (-0.5, 0.5)")
    out = -np.asarray(scale) * np.sign(u) * np.log1p(-2.0 * np.abs(u))
    return float(out) if out.ndim == 0 else out
