"""Command-line entry point.

Player numbers on the command line and in printed output are 1-based
positions in the instance file's ``costs`` array.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import astuple, fields

import numpy as np

from .centralized import solve_centralized
from .decentralized import (
    DEFAULT_MAX_N,
    KINDS,
    decentral_social_cost,
    decentral_variance,
    downward_closed_scan,
    enumerate_equilibria,
)
from .efficiency import price_of_stability, regime_cost_ratio
from .experiments import (
    MonteCarloConfig,
    default_sigma_grid,
    monte_carlo_variance,
    sweep_scaling,
    sweep_sigma,
    write_csv,
)
from .model import DEFAULT_TOL, Coalition, InstanceError, ProblemInstance, Tolerance

REQUIRED_KEYS = ("alpha", "sigma_sq", "costs")
DEFAULT_N_GRID = "16:2048:x2"


def parse_instance(source: str) -> ProblemInstance:
    """Load an instance from a file path or inline JSON text.

    The document is a flat object with ``alpha``, ``sigma_sq`` and
    ``costs``. Costs may come in any order.

    Raises:
        InstanceError: with ``code`` one of ``unreadable``, ``missing_key``,
            ``invalid_value``, ``non_positive_cost``, ``alpha_out_of_range``,
            ``sigma_sq_nonpositive``, ``empty_costs``.
    """
    text = source
    if not source.lstrip().startswith("{"):
        try:
            with open(source, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise InstanceError("unreadable", f"cannot read instance {source!r}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError("unreadable", f"instance is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise InstanceError("unreadable", "instance must be a JSON object")
    for key in REQUIRED_KEYS:
        if key not in doc:
            raise InstanceError("missing_key", f"instance is missing {key!r}")
    costs = doc["costs"]
    if not isinstance(costs, list) or not all(_is_number(c) for c in costs):
        raise InstanceError("invalid_value", "costs must be an array of numbers")
    for key in ("alpha", "sigma_sq"):
        if not _is_number(doc[key]):
            raise InstanceError("invalid_value", f"{key} must be a number")
    return ProblemInstance(costs, float(doc["sigma_sq"]), float(doc["alpha"]))


def _is_number(value) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def emit_instance(instance: ProblemInstance) -> str:
    """JSON text that :func:`parse_instance` reads back to an equal instance.

    Costs are written in their original input order when the labels are
    input positions.
    """
    costs = instance.costs.tolist()
    labels = instance.labels
    if sorted(labels) == list(range(instance.n)):
        original = [0.0] * instance.n
        for value, pos in zip(costs, labels):
            original[pos] = value
        costs = original
    return json.dumps({"alpha": instance.alpha, "sigma_sq": instance.sigma_sq, "costs": costs})


def parse_grid(text: str) -> np.ndarray:
    """``start:stop:step`` inclusive of ``stop``; ``step`` written ``xR`` is geometric."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"grid must look like start:stop:step, got {text!r}")
    start, stop = float(parts[0]), float(parts[1])
    step_text = parts[2].strip()
    if step_text.startswith("x"):
        ratio = float(step_text[1:])
        if ratio <= 1 or start <= 0:
            raise ValueError("geometric grid needs ratio > 1 and start > 0")
        count = int(np.floor(np.log(stop / start) / np.log(ratio) + 1e-9)) + 1
        return start * ratio ** np.arange(count)
    step = float(step_text)
    if step <= 0 or stop < start:
        raise ValueError("grid needs step > 0 and stop >= start")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return np.round(start + step * np.arange(count), 12)


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if x is None:
        return "-"
    if isinstance(x, str):
        return x
    return f"{float(x):.6g}"


def _players(coalition: Coalition, instance: ProblemInstance) -> str:
    if not coalition:
        return "{}"
    return "{" + ", ".join(str(p) for p in sorted(instance.labels[i] + 1 for i in coalition)) + "}"


def _print_table(header, rows, out) -> None:
    cells = [list(header)] + [[_fmt(v) for v in row] for row in rows]
    widths = [max(len(r[j]) for r in cells) for j in range(len(header))]
    for r in cells:
        out.write("  ".join(v.rjust(w) for v, w in zip(r, widths)) + "\n")


def _tolerance(args) -> Tolerance:
    if args.tolerance is None:
        return DEFAULT_TOL
    return Tolerance(abs_tol=DEFAULT_TOL.abs_tol, rel_tol=args.tolerance)


def _cmd_centralized(args, out) -> None:
    instance = parse_instance(args.instance)
    sol = solve_centralized(instance)
    out.write(f"k*: {sol.k_star}\n")
    out.write(f"coalition: {_players(sol.coalition, instance)}\n")
    for i in sol.coalition:
        out.write(f"  epsilon[{instance.labels[i] + 1}] = {_fmt(sol.profile[i])}\n")
    out.write(f"social_cost: {_fmt(sol.social_cost)}\n")
    out.write(f"variance: {_fmt(sol.variance)}\n")


def _cmd_equilibria(args, out) -> None:
    instance = parse_instance(args.instance)
    tol = _tolerance(args)
    if instance.n <= args.max_brute_force_n:
        found = enumerate_equilibria(instance, args.stability, max_n=args.max_brute_force_n, tol=tol)
    else:
        found = downward_closed_scan(instance, args.stability, tol=tol)
    out.write(f"{len(found)} {args.stability} equilibria\n")
    rows = [(_players(s, instance), s.size, decentral_social_cost(s, instance),
             decentral_variance(s, instance)) for s in found]
    if rows:
        _print_table(("coalition", "size", "social_cost", "variance"),
                     [(r[0].replace(" ", ""),) + r[1:] for r in rows], out)


def _cmd_pos(args, out) -> None:
    instance = parse_instance(args.instance)
    report = price_of_stability(instance, args.stability, max_n=args.max_brute_force_n,
                                tol=_tolerance(args))
    out.write(f"pos_sc: {_fmt(report.pos_sc)}\n")
    out.write(f"pos_var: {_fmt(report.pos_var)}\n")
    out.write(f"decentral_coalition: {_players(report.decentral_coalition, instance)}\n")
    out.write(f"central_k_star: {report.central_solution.k_star}\n")
    out.write(f"central_social_cost: {_fmt(report.central_solution.social_cost)}\n")
    out.write(f"bound_high_alpha: {_fmt(report.bound_high_alpha)}\n")


def _emit_rows(rows, args, out) -> None:
    if args.output:
        write_csv(rows, args.output, seed=args.seed, tol=_tolerance(args))
        out.write(f"wrote {len(rows)} rows to {args.output}\n")
    else:
        _print_table([f.name for f in fields(rows[0])], [astuple(r) for r in rows], out)


def _cmd_sweep_sigma(args, out) -> None:
    instance = parse_instance(args.instance)
    grid = default_sigma_grid() if args.grid is None else parse_grid(args.grid)
    rows = sweep_sigma(instance.costs, instance.alpha, grid, tol=_tolerance(args),
                       max_n=args.max_brute_force_n)
    _emit_rows(rows, args, out)


def _cmd_sweep_n(args, out) -> None:
    ns = parse_grid(args.grid or DEFAULT_N_GRID).round().astype(int)
    if args.instance:
        instance = parse_instance(args.instance)
        alpha, sigma_sq, c = instance.alpha, instance.sigma_sq, float(instance.costs[0])
    else:
        if args.alpha is None:
            raise InstanceError("missing_key", "sweep-n needs --alpha or --instance")
        alpha, sigma_sq = args.alpha, args.sigma_sq
        if args.cost is None:
            w = regime_cost_ratio(alpha, int(ns.min())) * sigma_sq
            c = float(np.sqrt(2.0 * w**3))
        else:
            c = args.cost
    result = sweep_scaling(alpha, c, sigma_sq, ns, kind=args.stability, tol=_tolerance(args))
    _emit_rows(result.rows, args, out)
    out.write(f"# alpha={_fmt(alpha)} c={_fmt(c)} sigma_sq={_fmt(sigma_sq)}\n")
    for name, fit in result.fits.items():
        out.write(f"# slope {name}: {_fmt(fit.slope)} (r2 {_fmt(fit.r2)})\n")


def _cmd_simulate(args, out) -> None:
    instance = parse_instance(args.instance)
    position = {label + 1: i for i, label in enumerate(instance.labels)}
    try:
        picked = [position[int(p)] for p in args.coalition.split(",")]
    except (KeyError, ValueError) as exc:
        raise ValueError(f"bad --coalition {args.coalition!r}: players are 1..{instance.n}") from exc
    coalition = Coalition(tuple(picked))
    config = MonteCarloConfig(samples=args.samples, seed=args.seed,
                              data_distribution=args.distribution, p=args.p)
    res = monte_carlo_variance(coalition, instance, config)
    out.write(f"coalition: {_players(coalition, instance)}\n")
    out.write(f"empirical_var: {_fmt(res.empirical_var)}\n")
    out.write(f"predicted: {_fmt(res.predicted)}\n")
    out.write(f"standard_error: {_fmt(res.standard_error)}\n")
    out.write(f"z_score: {_fmt(res.z_score)}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--stability", choices=KINDS, default="nash")
    common.add_argument("--tolerance", type=float, default=None,
                        help="relative tolerance for stability comparisons (default 1e-9)")
    common.add_argument("--max-brute-force-n", type=int, default=DEFAULT_MAX_N)
    common.add_argument("--output", default=None, help="write CSV here instead of a table")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--grid", default=None, help="start:stop:step, or start:stop:xRATIO")

    parser = argparse.ArgumentParser(prog="dpcoalition",
                                     description="Stable and optimal data-sharing coalitions.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in [("centralized", "optimal coalition chosen by a central designer"),
                           ("equilibria", "list stable coalitions"),
                           ("pos", "price of stability"),
                           ("sweep-sigma", "equilibria over a grid of sigma values")]:
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("--instance", required=True)
    p = sub.add_parser("sweep-n", parents=[common], help="identical-cost scaling in n")
    p.add_argument("--instance", default=None)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--cost", type=float, default=None)
    p.add_argument("--sigma-sq", type=float, default=1.0)
    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo check of the variance formula")
    p.add_argument("--instance", required=True)
    p.add_argument("--coalition", required=True, help="comma-separated player numbers")
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--distribution", choices=("uniform_01", "point_mass", "bernoulli"),
                   default="uniform_01")
    p.add_argument("--p", type=float, default=0.5)
    return parser


COMMANDS = {
    "centralized": _cmd_centralized,
    "equilibria": _cmd_equilibria,
    "pos": _cmd_pos,
    "sweep-sigma": _cmd_sweep_sigma,
    "sweep-n": _cmd_sweep_n,
    "simulate": _cmd_simulate,
}


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        COMMANDS[args.command](args, out)
    except InstanceError as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return 1
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
