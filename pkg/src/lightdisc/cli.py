"""Command-line front end: error-probability sweeps and distribution tables.

Subcommands:
  curves    analytic error curves and bounds over a signal-strength grid
  dist      one counting pmf as a table (poisson | bose_einstein | laguerre)
  losweep   analytic + Monte Carlo error vs the over-displacement beta
  simulate  single-point Monte Carlo for one receiver

Output is CSV (default) or JSON carrying the same values. Floats are written
with 17 significant digits, so identical invocations are byte-identical.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from . import receivers as rx
from . import simkit
from .fock import TruncationError
from .photostats import bose_einstein_pmf, laguerre_pmf, poisson_pmf

RECEIVER_ORDER = rx.RECEIVER_NAMES
BOUND_ORDER = rx.BOUND_NAMES
_KIND_BY_NAME = {k.value: k for k in simkit.ReceiverKind}


class CliError(Exception):
    """Usage or validation problem; main() turns it into exit status 2."""


def default_grid() -> list[float]:
    return [float(v) for v in np.logspace(math.log10(1e-3), math.log10(2.0), 60)]


@dataclass
class SweepConfig:
    """Validated inputs for cmd_curves."""

    nbar_grid: list[float] = field(default_factory=default_grid)
    receivers: tuple[str, ...] = RECEIVER_ORDER
    bounds: tuple[str, ...] = BOUND_ORDER
    trials: int | None = None
    seed: int = 0
    output_format: str = "csv"

    def validate(self) -> "SweepConfig":
        if not self.nbar_grid:
            raise CliError("nbar grid must not be empty")
        if any(v < 0 for v in self.nbar_grid):
            raise CliError("nbar values must be nonnegative")
        if any(b <= a for a, b in zip(self.nbar_grid, self.nbar_grid[1:])):
            raise CliError("nbar grid must be strictly ascending")
        for name in self.receivers:
            if name not in RECEIVER_ORDER:
                raise CliError(f"unknown receiver '{name}'")
        for name in self.bounds:
            if name not in BOUND_ORDER:
                raise CliError(f"unknown bound '{name}'")
        if self.trials is not None and self.trials < 1:
            raise CliError("trials must be positive")
        if self.output_format not in ("csv", "json"):
            raise CliError(f"unknown format '{self.output_format}'")
        return self


def _fmt(value) -> str:
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def _write_rows(columns, rows, fmt: str, out: str | None) -> None:
    if fmt == "csv":
        lines = [",".join(columns)]
        lines += [",".join(_fmt(row[c]) for c in columns) for row in rows]
        text = "\n".join(lines) + "\n"
    else:
        payload = {"columns": list(columns),
                   "rows": [{c: row[c] for c in columns} for row in rows]}
        text = json.dumps(payload, indent=2) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)


def _parse_grid(text: str) -> list[float]:
    """Grid spec: 'log:A:B:N', 'lin:A:B:N', or a comma list of values."""
    try:
        if text.startswith(("log:", "lin:")):
            kind, a, b, n = text.split(":")
            lo, hi, num = float(a), float(b), int(n)
            if num < 1:
                raise CliError("grid needs at least one point")
            if num == 1:
                return [lo]
            if kind == "log":
                if lo <= 0 or hi <= 0:
                    raise CliError("log grid endpoints must be positive")
                return [float(v) for v in
                        np.logspace(math.log10(lo), math.log10(hi), num)]
            return [float(v) for v in np.linspace(lo, hi, num)]
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except (ValueError, TypeError) as exc:
        raise CliError(f"bad grid spec '{text}': {exc}") from None


def _split_csv_flag(text: str, allowed, what: str) -> tuple[str, ...]:
    names = tuple(tok.strip() for tok in text.split(",") if tok.strip())
    for name in names:
        if name not in allowed:
            raise CliError(f"unknown {what} '{name}'")
    # canonical order regardless of how the user listed them
    return tuple(name for name in allowed if name in names)


def _mc_seed(seed: int, row: int, kth: int) -> int:
    return int(np.random.SeedSequence((seed, 104729, row, kth)).generate_state(1, np.uint64)[0])


def _mc_columns(names) -> list[str]:
    cols = []
    for name in names:
        cols += [f"{name}_mc", f"{name}_ci_lo", f"{name}_ci_hi"]
    return cols


def cmd_curves(config: SweepConfig, out: str | None = None) -> int:
    config.validate()
    columns = ["nbar_s"]
    for name in RECEIVER_ORDER:
        if name in config.receivers:
            columns.append(name)
            if name == "gk":
                columns.append("gk_beta")
    if "helstrom" in config.bounds:
        columns.append("helstrom")
    if "chernoff" in config.bounds:
        columns += ["chernoff_s", "chernoff_q"]
    if config.trials:
        columns += _mc_columns(config.receivers)

    rows = []
    for i, ns in enumerate(config.nbar_grid):
        problem = rx.DiscriminationProblem(ns)
        point = rx.curve_point(problem, config.receivers, config.bounds)
        row = {"nbar_s": ns}
        for name in ("dd", "hd", "kennedy", "gk", "gk_beta",
                     "helstrom", "chernoff_s", "chernoff_q"):
            value = getattr(point, name)
            if value is not None:
                row[name] = value
        if config.trials:
            for kth, name in enumerate(RECEIVER_ORDER):
                if name not in config.receivers:
                    continue
                beta = row.get("gk_beta", 0.0) if name == "gk" else 0.0
                spec = simkit.ReceiverSpec(kind=_KIND_BY_NAME[name], beta=beta,
                                           detector=simkit.DetectorModel.ideal())
                batch = simkit.run_trials(spec, problem, config.trials,
                                          _mc_seed(config.seed, i, kth))
                p_hat, (lo, hi) = simkit.empirical_error(batch)
                row[f"{name}_mc"] = p_hat
                row[f"{name}_ci_lo"] = lo
                row[f"{name}_ci_hi"] = hi
        rows.append(row)
    _write_rows(columns, rows, config.output_format, out)
    return 0


def cmd_dist(family: str, params: list[float], n_cap: int | None,
             fmt: str, out: str | None = None) -> int:
    makers = {"poisson": (poisson_pmf, 1), "bose_einstein": (bose_einstein_pmf, 1),
              "laguerre": (laguerre_pmf, 2)}
    if family not in makers:
        raise CliError(f"unknown family '{family}' (poisson | bose_einstein | laguerre)")
    maker, arity = makers[family]
    if len(params) != arity:
        raise CliError(f"{family} takes {arity} parameter(s), got {len(params)}")
    dist = maker(*params, n_cap)
    rows = [{"n": n, "probability": float(p)} for n, p in enumerate(dist.pmf)]
    _write_rows(["n", "probability"], rows, fmt, out)
    return 0


def cmd_losweep(nbar_s: float, beta_min: float, beta_max: float, steps: int,
                trials: int, seed: int, extinction_db: float,
                dark_rate: float = 0.0, fmt: str = "csv",
                out: str | None = None) -> int:
    if beta_min < 0 or beta_max <= beta_min:
        raise CliError("need 0 <= beta-min < beta-max")
    if steps < 2:
        raise CliError("steps must be at least 2")
    problem = rx.DiscriminationProblem(nbar_s)
    grid = [float(b) for b in np.linspace(beta_min, beta_max, steps)]
    template = simkit.ReceiverSpec(
        kind=simkit.ReceiverKind.GENERALIZED_KENNEDY,
        extinction_db=extinction_db,
        detector=simkit.DetectorModel(dark_rate=dark_rate))
    rows = []
    for beta, analytic, p_hat, (lo, hi) in simkit.lo_sweep(
            problem, grid, template, n_trials=trials, seed=seed):
        rows.append({"beta": beta,
                     "nbar_lo": (math.sqrt(nbar_s) + beta) ** 2,
                     "analytic": analytic, "empirical": p_hat,
                     "ci_lo": lo, "ci_hi": hi})
    _write_rows(["beta", "nbar_lo", "analytic", "empirical", "ci_lo", "ci_hi"],
                rows, fmt, out)
    return 0


def cmd_simulate(receiver: str, nbar_s: float, beta: float | None, trials: int,
                 seed: int, extinction_db: float, dark_rate: float,
                 records: bool, fmt: str, out: str | None = None) -> int:
    if receiver not in RECEIVER_ORDER:
        raise CliError(f"unknown receiver '{receiver}'")
    problem = rx.DiscriminationProblem(nbar_s)
    if receiver == "gk":
        beta = rx.gk_error(problem).beta if beta is None else beta
    elif beta not in (None, 0.0):
        raise CliError("--beta applies only to the gk receiver")
    else:
        beta = 0.0
    kind = _KIND_BY_NAME[receiver]
    ext = extinction_db if kind in simkit._DISPLACED else math.inf
    spec = simkit.ReceiverSpec(kind=kind, beta=beta, extinction_db=ext,
                               detector=simkit.DetectorModel(dark_rate=dark_rate))
    batch = simkit.run_trials(spec, problem, trials, seed)
    if records:
        rows = [{"trial": i, "hypothesis": r.hypothesis.value,
                 "observation": r.observation, "decision": r.decision.value}
                for i, r in enumerate(batch.records)]
        _write_rows(["trial", "hypothesis", "observation", "decision"], rows, fmt, out)
        return 0
    p_hat, (lo, hi) = simkit.empirical_error(batch)
    row = {"receiver": receiver, "nbar_s": nbar_s, "beta": beta,
           "trials": trials, "seed": seed,
           "analytic": simkit.analytic_error(spec, problem),
           "empirical": p_hat, "ci_lo": lo, "ci_hi": hi}
    _write_rows(list(row), [row], fmt, out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lightdisc",
        description="Laser-vs-thermal discrimination: error curves, counting "
                    "statistics, and Monte Carlo receiver simulation.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--out", default=None, metavar="PATH",
                       help="write to a file instead of stdout")

    p = sub.add_parser("curves", help="error curves over a signal-strength grid")
    p.add_argument("--nbar", type=float, default=None,
                   help="single signal strength (overrides --grid)")
    p.add_argument("--grid", default=None,
                   help="log:A:B:N | lin:A:B:N | comma list (default log:1e-3:2:60)")
    p.add_argument("--receivers", default=",".join(RECEIVER_ORDER),
                   help="comma subset of dd,hd,kennedy,gk")
    p.add_argument("--bounds", default=",".join(BOUND_ORDER),
                   help="comma subset of helstrom,chernoff")
    p.add_argument("--trials", type=int, default=None,
                   help="add Monte Carlo columns from this many trials per point")
    p.add_argument("--seed", type=int, default=0)
    common(p)

    p = sub.add_parser("dist", help="print one counting pmf")
    p.add_argument("family", choices=("poisson", "bose_einstein", "laguerre"))
    p.add_argument("params", type=float, nargs="+",
                   help="poisson MEAN | bose_einstein NBAR | laguerre NBAR_TH D2")
    p.add_argument("--n-cap", type=int, default=None)
    common(p)

    p = sub.add_parser("losweep", help="error vs over-displacement beta")
    p.add_argument("--nbar", type=float, required=True)
    p.add_argument("--beta-min", type=float, default=0.0)
    p.add_argument("--beta-max", type=float, required=True)
    p.add_argument("--steps", type=int, default=25)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--extinction-db", type=float, default=math.inf)
    p.add_argument("--dark-rate", type=float, default=0.0,
                   help="dark counts per second")
    common(p)

    p = sub.add_parser("simulate", help="single-point Monte Carlo run")
    p.add_argument("--receiver", required=True, choices=RECEIVER_ORDER)
    p.add_argument("--nbar", type=float, required=True)
    p.add_argument("--beta", type=float, default=None,
                   help="gk over-displacement (default: optimized)")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--extinction-db", type=float, default=math.inf)
    p.add_argument("--dark-rate", type=float, default=0.0)
    p.add_argument("--records", action="store_true",
                   help="emit per-trial records instead of the summary row")
    common(p)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "curves":
            grid = default_grid()
            if args.grid is not None:
                grid = _parse_grid(args.grid)
            if args.nbar is not None:
                grid = [args.nbar]
            config = SweepConfig(
                nbar_grid=grid,
                receivers=_split_csv_flag(args.receivers, RECEIVER_ORDER, "receiver"),
                bounds=_split_csv_flag(args.bounds, BOUND_ORDER, "bound"),
                trials=args.trials, seed=args.seed, output_format=args.format)
            return cmd_curves(config, args.out)
        if args.command == "dist":
            return cmd_dist(args.family, args.params, args.n_cap, args.format, args.out)
        if args.command == "losweep":
            return cmd_losweep(args.nbar, args.beta_min, args.beta_max, args.steps,
                               args.trials, args.seed, args.extinction_db,
                               args.dark_rate, args.format, args.out)
        if args.command == "simulate":
            return cmd_simulate(args.receiver, args.nbar, args.beta, args.trials,
                                args.seed, args.extinction_db, args.dark_rate,
                                args.records, args.format, args.out)
        raise CliError(f"unknown command '{args.command}'")
    except (CliError, TruncationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
