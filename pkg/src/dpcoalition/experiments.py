"""Batch drivers: sigma sweeps, n-scaling fits, Monte Carlo checks, instance generation."""

from __future__ import annotations

import csv
import io
from dataclasses import astuple, dataclass, fields

import numpy as np

from .decentralized import DEFAULT_MAX_N, best_response_profile, enumerate_equilibria
from .efficiency import optimal_stable_coalition, price_of_stability, regime_cost_ratio
from .fitting import PowerFit, fit_power_law
from .model import (
    DEFAULT_TOL,
    Coalition,
    PrivacyProfile,
    ProblemInstance,
    Tolerance,
    laplace_sample,
)

RNG_ID = "numpy.random.PCG64"

# Cost list of the nine-player example whose Nash equilibria vanish and reappear as sigma grows.
NONMONOTONE_COSTS = (2.2e-4, 5.4e-4, 7.0e-4, 11e-4, 30e-4, 33e-4, 34e-4, 36e-4, 38e-4)
MULTIPLICITY_COSTS = (1.80e-3, 2.15e-3, 2.20e-3, 15e-3, 15.5e-3, 17e-3)


def default_sigma_grid() -> np.ndarray:
    """``sigma`` from 0.15 to 0.60 in steps of 0.005."""
    return np.round(np.linspace(0.15, 0.60, 91), 10)


@dataclass(frozen=True)
class SweepRow:
    sigma: float
    max_nash_size: int
    max_robust_size: int
    nash_exists: bool
    robust_exists: bool
    best_sc_nash: float
    best_sc_robust: float


@dataclass(frozen=True)
class ScalingRow:
    n: int
    sc_central: float
    var_central: float
    sc_decentral: float
    var_decentral: float
    pos_sc: float
    pos_var: float


@dataclass(frozen=True)
class ScalingResult:
    rows: list
    fits: dict
    """Column name -> :class:`PowerFit` of that column against ``n``."""


@dataclass(frozen=True)
class MonteCarloConfig:
    samples: int = 100_000
    seed: int = 0
    data_distribution: str = "uniform_01"
    p: float = 0.5
    """Success probability for ``"bernoulli"``."""

    def data_variance(self) -> float:
        if self.data_distribution == "uniform_01":
            return 1.0 / 12.0
        if self.data_distribution == "point_mass":
            return 0.0
        if self.data_distribution == "bernoulli":
            return self.p * (1.0 - self.p)
        raise ValueError(f"unknown data distribution {self.data_distribution!r}")

    def draw(self, rng: np.random.Generator, shape) -> np.ndarray:
        if self.data_distribution == "uniform_01":
            return rng.random(shape)
        if self.data_distribution == "point_mass":
            return np.full(shape, 0.5)
        if self.data_distribution == "bernoulli":
            return (rng.random(shape) < self.p).astype(float)
        raise ValueError(f"unknown data distribution {self.data_distribution!r}")


@dataclass(frozen=True)
class MonteCarloResult:
    empirical_var: float
    predicted: float
    z_score: float
    standard_error: float


def sweep_sigma(costs, alpha: float, sigma_grid, tol: Tolerance = DEFAULT_TOL,
                max_n: int = DEFAULT_MAX_N) -> list:
    """Equilibrium existence, largest size and best social cost at each ``sigma``."""
    grid = np.asarray(sigma_grid, dtype=float)
    if np.any(grid <= 0) or np.any(np.diff(grid) <= 0):
        raise ValueError("sigma grid must be positive and strictly ascending")
    rows = []
    for sigma in grid:
        instance = ProblemInstance(costs, float(sigma) ** 2, alpha)
        sizes, best = {}, {}
        for kind in ("nash", "robust"):
            found = enumerate_equilibria(instance, kind, max_n=max_n, tol=tol)
            sizes[kind] = max((len(s) for s in found), default=0)
            best[kind] = optimal_stable_coalition(instance, kind, max_n=max_n, tol=tol).social_cost
        rows.append(SweepRow(float(sigma), sizes["nash"], sizes["robust"], sizes["nash"] > 0,
                             sizes["robust"] > 0, best["nash"], best["robust"]))
    return rows


def sweep_scaling(alpha: float, c: float, sigma_sq: float, n_grid, kind: str = "nash",
                  tol: Tolerance = DEFAULT_TOL) -> ScalingResult:
    """Central and decentral optima on identical-cost instances, with log-log fits.

    Every ``n`` is solved exactly: the central optimum by a scan over sizes
    and the decentral one through the identical-cost structure.
    """
    ns = [int(n) for n in n_grid]
    if len(set(ns)) < 2:
        raise ValueError("need at least two distinct n values")
    rows = []
    for n in ns:
        instance = ProblemInstance.identical(n, c, sigma_sq, alpha)
        # identical costs are solved analytically at any n
        report = price_of_stability(instance, kind, max_n=0, tol=tol)
        central = report.central_solution
        var_central = sigma_sq if central.variance is None else central.variance
        decentral = optimal_stable_coalition(instance, kind, max_n=0, tol=tol)
        rows.append(ScalingRow(n, central.social_cost, var_central, decentral.social_cost,
                               decentral.variance, report.pos_sc, report.pos_var))
    fits = {}
    for f in fields(ScalingRow)[1:]:
        fits[f.name] = fit_power_law(ns, [getattr(r, f.name) for r in rows])
    return ScalingResult(rows, fits)


def monte_carlo_variance(coalition: Coalition, instance: ProblemInstance,
                         config: MonteCarloConfig,
                         profile: PrivacyProfile | None = None) -> MonteCarloResult:
    """Simulate the pooled noisy mean and compare its variance to the formula.

    Members report ``x_i + Laplace(1/eps_i)``; ``profile`` defaults to the
    best-response levels. The prediction uses the data distribution's own
    variance, which may differ from ``instance.sigma_sq`` (a point mass has
    none).
    """
    if not coalition:
        raise ValueError("no estimator for empty coalition")
    if config.samples < 2:
        raise ValueError("need at least two samples")
    profile = best_response_profile(coalition, instance) if profile is None else profile
    eps = profile.array(coalition)
    k = len(coalition)
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(config.seed)))
    shape = (config.samples, k)
    data = config.draw(rng, shape)
    u = rng.random(shape) - 0.5
    # random() can return exactly 0, which maps to the excluded endpoint -1/2
    u[u <= -0.5] = 0.0
    estimates = np.mean(data + laplace_sample(1.0 / eps, u), axis=1)
    centered = estimates - estimates.mean()
    emp = float(np.var(estimates, ddof=1))
    m4 = float(np.mean(centered**4))
    se = float(np.sqrt(max(m4 - emp**2, 0.0) / config.samples))
    predicted = config.data_variance() / k + 2.0 / k**2 * float(np.sum(1.0 / eps**2))
    return MonteCarloResult(emp, predicted, (emp - predicted) / se, se)


def random_instance(n: int, cost_range: tuple, alpha: float, sigma_sq: float, seed: int,
                    well_separated: bool = False) -> ProblemInstance:
    """Costs drawn uniformly from ``cost_range``, sorted; reproducible under ``seed``.

    With ``well_separated`` the costs are spread log-uniformly so that each is
    at least twice the previous one, which needs ``c_max >= 2**(n-1) c_min``.
    """
    c_min, c_max = map(float, cost_range)
    if not 0 < c_min <= c_max:
        raise ValueError("need 0 < c_min <= c_max")
    rng = np.random.Generator(np.random.PCG64(seed))
    if not well_separated:
        return ProblemInstance(np.sort(rng.uniform(c_min, c_max, n)), sigma_sq, alpha)
    spare = np.log(c_max / c_min) - (n - 1) * np.log(2.0)
    if spare < 0:
        raise ValueError(f"cannot fit {n} well-separated costs in [{c_min}, {c_max}]")
    # nondecreasing offsets keep every ratio >= 2
    offsets = np.sort(rng.uniform(0.0, spare, n))
    offsets -= offsets[0]
    costs = c_min * np.exp(np.arange(n) * np.log(2.0) + offsets)
    return ProblemInstance(costs, sigma_sq, alpha)


def _fmt(value):
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(rows: list, out=None, seed: int | None = None,
              tol: Tolerance = DEFAULT_TOL) -> str:
    """Write ``SweepRow``/``ScalingRow`` records as CSV with a ``# meta`` line.

    Returns the text; also writes it to ``out`` (path or file object) if given.
    """
    if not rows:
        raise ValueError("no rows to write")
    buf = io.StringIO()
    buf.write(f"# meta seed={seed} abs_tol={tol.abs_tol!r} rel_tol={tol.rel_tol!r} generator={RNG_ID}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([f.name for f in fields(rows[0])])
    for row in rows:
        writer.writerow([_fmt(v) for v in astuple(row)])
    text = buf.getvalue()
    if isinstance(out, str):
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    elif out is not None:
        out.write(text)
    return text


def read_csv(text: str) -> tuple:
    """Parse text produced by :func:`write_csv` into ``(meta_line, header, rows)``."""
    lines = text.splitlines()
    meta = lines[0] if lines and lines[0].startswith("# meta") else None
    body = lines[1:] if meta else lines
    reader = csv.reader(body)
    header = next(reader)
    return meta, header, [r for r in reader]


__all__ = [
    "NONMONOTONE_COSTS", "MULTIPLICITY_COSTS", "MonteCarloConfig", "MonteCarloResult", "PowerFit",
    "RNG_ID", "ScalingResult", "ScalingRow", "SweepRow", "default_sigma_grid", "fit_power_law",
    "monte_carlo_variance", "random_instance", "read_csv", "regime_cost_ratio", "sweep_scaling",
    "sweep_sigma", "write_csv",
]
