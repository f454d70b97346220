"""Command-line front end.

Every subcommand reads an optional config file plus ``key=value`` overrides
and writes CSV to ``--out`` (or stdout).  Exit status: 0 success, 1 invalid
input, 2 numerical failure, 3 Monte Carlo z-score breach, 4 Monte Carlo delay
reported only as a lower bound (underflowed realizations).
"""

from __future__ import annotations

import argparse
import math
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import mcsim, metrics, optimizer
from .config import McConfig, RunConfig, load_config
from .core import sir_ccdf
from .errors import ConfigurationError, DomainError, NoSignChangeError, NumericalError
from .table import SweepTable

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NUMERICAL = 2
EXIT_Z_BREACH = 3
EXIT_LOWER_BOUND = 4

Z_LIMIT = 3.0
FIG1_PS = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9)
FIG2_LAMBDAS = (0.01, 0.05, 0.1, 0.2, 0.35, 0.5)
FIG3_RANGE = (1e-5, 1e-1)
FIG3_FIXED = (0.6, 0.4)
REPORT_FIELDS = ("capacity", "affected_area", "ase", "delay", "utility", "d0")
PARAM_COLUMNS = (("lambda", "lam"), ("alpha", "alpha"), ("d_sd", "d_sd"),
                 ("p", "p"), ("tau", "tau"), ("p_s", "p_s"))


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on bad usage; here 2 means a numerical failure."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _fmt12(value) -> str:
    value = float(value)
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return format(value, ".12g")


def _emit(table: SweepTable, path) -> None:
    if path:
        table.write(path)
    else:
        sys.stdout.write(table.to_csv())


def _capacity_scale(args) -> float:
    return 1.0 / math.log(2.0) if getattr(args, "bits", False) else 1.0


def _report_row(report: metrics.MetricReport, scale: float) -> list:
    values = [getattr(report, name) for name in REPORT_FIELDS]
    # capacity and ase carry the information unit
    values[0] *= scale
    values[2] *= scale
    values[4] *= scale
    return values


def _configure(args) -> RunConfig:
    overrides = list(args.overrides)
    if getattr(args, "tau_db", None) is not None:
        overrides.append(f"tau_db={args.tau_db!r}")
    if getattr(args, "n", None) is not None:
        overrides.append(f"mc.n={args.n}")
    if getattr(args, "seed", None) is not None:
        overrides.append(f"mc.seed={args.seed}")
    return load_config(args.config, overrides)


def _output(args, config: RunConfig):
    return args.out or config.output_path


# -- subcommands -------------------------------------------------------------

def cmd_eval(args) -> int:
    config = _configure(args)
    if config.sweep is not None:
        raise ConfigurationError("eval takes a single point; use the sweep subcommand for [sweep]")
    params = config.params
    report = metrics.evaluate(params)
    scale = _capacity_scale(args)
    values = _report_row(report, scale)
    for name, value in zip(REPORT_FIELDS, values):
        print(f"{name} = {_fmt12(value)}")
    out = _output(args, config)
    if out:
        table = SweepTable([c for c, _ in PARAM_COLUMNS] + list(REPORT_FIELDS))
        table.add(*[getattr(params, f) for _, f in PARAM_COLUMNS], *values)
        table.write(out)
    return EXIT_OK


def _sweep_row(job):
    params, with_mc, mc = job
    report = metrics.evaluate(params)
    row = [sir_ccdf(params)] + [getattr(report, name) for name in REPORT_FIELDS]
    if with_mc:
        if 0.0 < params.p < 1.0:
            est = mcsim.estimate_all(params, mc.n, mc.radius, mc.seed)
            row += [est["sir_ccdf"].value, est["sir_ccdf"].std_error,
                    est["capacity"].value, est["capacity"].std_error,
                    est["delay"].value, est["delay"].std_error]
        else:
            row += [math.nan] * 6
    return row


def cmd_sweep(args) -> int:
    config = _configure(args)
    if config.sweep is None:
        raise ConfigurationError("sweep needs a [sweep] section (variable, start, stop, count)")
    sweep = config.sweep
    with_mc = config.mc is not None
    columns = [sweep.variable, "sir_ccdf", *REPORT_FIELDS]
    if with_mc:
        columns += ["mc_sir_ccdf", "mc_sir_ccdf_se", "mc_capacity", "mc_capacity_se",
                    "mc_delay", "mc_delay_se"]
    jobs = [(config.params.with_(**{sweep.field: value}), with_mc, config.mc)
            for value in sweep.values()]
    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            rows = list(pool.map(_sweep_row, jobs))
    else:
        rows = [_sweep_row(job) for job in jobs]
    scale = _capacity_scale(args)
    table = SweepTable(columns)
    for value, row in zip(sweep.values(), rows):
        # capacity, ase, utility (and the MC capacity pair) carry the unit
        for i in (1, 3, 5):
            row[i] *= scale
        if with_mc:
            row[9] *= scale
            row[10] *= scale
        table.add(value, *row)
    _emit(table, _output(args, config))
    return EXIT_OK


def cmd_optimize(args) -> int:
    config = _configure(args)
    params = config.params
    tol = args.tol
    try:
        if args.joint:
            result = optimizer.joint_optimum(params, tol=tol)
            mode = "alternating"
        else:
            result = optimizer.optimal_p(params, tol=tol)
            mode = "p-given-tau"
    except NoSignChangeError as exc:
        print(f"error: {exc}; better endpoint p={exc.report.p_star!r} "
              f"U={exc.report.u_star!r}", file=sys.stderr)
        return EXIT_NUMERICAL
    tau_given_p = optimizer.optimal_tau(params) if 0.0 < params.p < 1.0 else math.nan
    table = SweepTable(["mode", "tau_star", "p_star", "u_star", "iterations", "residual",
                        "bracket_lo", "bracket_hi", "n_roots", "tau_star_given_p"])
    table.add(mode, result.tau_star, result.p_star, result.u_star, result.iterations,
              result.residual, result.bracket[0], result.bracket[1], result.n_roots,
              tau_given_p)
    _emit(table, _output(args, config))
    return EXIT_OK


def _validation_rows(params, mc: McConfig, workers: int):
    """(quantity, analytic, estimate) triples for the quantities valid at ``params``."""
    if 0.0 < params.p < 1.0:
        est = mcsim.estimate_all(params, mc.n, mc.radius, mc.seed, workers=workers)
        return [
            ("sir_ccdf", sir_ccdf(params), est["sir_ccdf"]),
            ("capacity", metrics.capacity(params), est["capacity"]),
            ("delay", metrics.mean_local_delay(params), est["delay"]),
        ]
    rows = [("sir_ccdf", sir_ccdf(params),
             mcsim.estimate_sir_ccdf(params, mc.n, mc.radius, mc.seed, workers=workers))]
    rows.append(("capacity", metrics.capacity(params),
                 mcsim.estimate_capacity(params, mc.n, mc.radius, mc.seed, workers=workers)))
    return rows


def cmd_validate(args) -> int:
    config = _configure(args)
    mc = config.mc
    if mc is None:
        raise ConfigurationError("validate needs an [mc] section or --n/--seed")
    params = config.params
    rows = _validation_rows(params, mc, args.workers)
    table = SweepTable(["quantity", "analytic", "mc", "std_error", "z", "n", "seed",
                        "flagged", "lower_bound", "max_share"])
    breach = lower = False
    for name, analytic, est in rows:
        z = est.z_score(analytic)
        table.add(name, analytic, est.value, est.std_error, z, est.n_realizations,
                  est.seed, est.flagged, est.lower_bound, est.max_share)
        if est.lower_bound:
            print(f"{name}: {est.flagged} realizations underflowed; "
                  f"{_fmt12(est.value)} is a lower bound", file=sys.stderr)
            lower = True
        elif not abs(z) <= Z_LIMIT:
            print(f"{name}: |z| = {abs(z):.3g} exceeds {Z_LIMIT}", file=sys.stderr)
            breach = True
    if args.dump:
        count = mcsim.dump_realizations(args.dump, params, min(args.dump_count, mc.n),
                                        mc.radius, mc.seed)
        print(f"wrote {count} points to {args.dump}", file=sys.stderr)
    _emit(table, _output(args, config))
    if lower:
        return EXIT_LOWER_BOUND
    return EXIT_Z_BREACH if breach else EXIT_OK


def _grid(args, default: int) -> int:
    grid = default if args.grid is None else args.grid
    if grid < 2:
        raise ConfigurationError(f"--grid must be >= 2, got {grid}")
    return grid


def fig1_table(params, grid: int = 200) -> SweepTable:
    """U(lambda) for p = 0.1..0.9 on lambda = k/grid, k = 1..grid."""
    table = SweepTable(["lambda"] + [f"U_p{p:g}" for p in FIG1_PS])
    for k in range(1, grid + 1):
        lam = k / grid
        row = [metrics.utility(params.with_(lam=lam, p=p)) for p in FIG1_PS]
        table.add(lam, *row)
    return table


def fig2_table(params, grid: int = 200, lambdas=FIG2_LAMBDAS) -> SweepTable:
    """D(p) for several densities on p = k/(grid+1), k = 1..grid."""
    table = SweepTable(["p"] + [f"D_lam{lam:g}" for lam in lambdas])
    for k in range(1, grid + 1):
        p = k / (grid + 1)
        table.add(p, *[metrics.mean_local_delay(params.with_(lam=lam, p=p)) for lam in lambdas])
    return table


def fig3_rows(params, grid: int = 60, tol: float = 1e-8, workers: int = 1):
    lambdas = np.logspace(math.log10(FIG3_RANGE[0]), math.log10(FIG3_RANGE[1]), grid)
    return optimizer.adaptive_frontier(lambdas, params, tol=tol, fixed_ps=FIG3_FIXED,
                                       workers=workers)


def fig3_table(rows) -> SweepTable:
    columns = ["lambda", "p_star", "status", "ase_adaptive", "delay_adaptive"]
    for p in FIG3_FIXED:
        columns += [f"ase_p{p:g}", f"delay_p{p:g}"]
    table = SweepTable(columns)
    for r in rows:
        values = [r.lam, r.p_star, r.status.split(":")[0], r.ase_adaptive, r.delay_adaptive]
        for p in FIG3_FIXED:
            values += list(r.baselines[p])
        table.add(*values)
    return table


def cmd_fig1(args) -> int:
    config = _configure(args)
    _emit(fig1_table(config.params, _grid(args, 200)), _output(args, config))
    return EXIT_OK


def cmd_fig2(args) -> int:
    config = _configure(args)
    lambdas = FIG2_LAMBDAS if args.lambdas is None else tuple(args.lambdas)
    _emit(fig2_table(config.params, _grid(args, 200), lambdas), _output(args, config))
    return EXIT_OK


def cmd_fig3(args) -> int:
    config = _configure(args)
    rows = fig3_rows(config.params, _grid(args, 60), args.tol, args.workers)
    _emit(fig3_table(rows), _output(args, config))
    failed = [r for r in rows if r.status.startswith("failed")]
    for r in failed:
        print(f"lambda={r.lam!r}: {r.status}", file=sys.stderr)
    try:
        gains = optimizer.frontier_gains(rows)
    except ValueError as exc:
        print(f"gains unavailable: {exc}", file=sys.stderr)
    else:
        print(f"delay reduction at ASE 0.02 vs p=0.6: {gains['delay_reduction']:.4f}",
              file=sys.stderr)
        print(f"ASE gain at delay 1.8 vs p=0.6: {gains['ase_gain']:.4f}", file=sys.stderr)
    return EXIT_OK


# -- argument parsing ----------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value config file")
    common.add_argument("--out", help="CSV destination (default stdout)")
    common.add_argument("--tau-db", type=float, help="SIR threshold in dB, converted to linear")
    common.add_argument("overrides", nargs="*", metavar="key=value",
                        help="parameter overrides, section.key=value for [sweep]/[mc]")

    parser = _Parser(prog="ppp-ase", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("eval", parents=[common], help="all metrics at one point")
    p.add_argument("--bits", action="store_true", help="capacity and ASE in bits")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", parents=[common], help="metrics along a [sweep]")
    p.add_argument("--bits", action="store_true", help="capacity and ASE in bits")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--seed", type=int)
    p.add_argument("--n", type=int)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("optimize", parents=[common], help="optimal p (and tau)")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--joint", action="store_true", help="alternate tau and p steps")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("validate", parents=[common], help="Monte Carlo vs closed forms")
    p.add_argument("--seed", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--dump", help="write realization_id,x,y,fading,mark lines here")
    p.add_argument("--dump-count", type=int, default=10, help="realizations to dump")
    p.set_defaults(func=cmd_validate)

    for name, func, helptext in (("fig1", cmd_fig1, "utility vs density"),
                                 ("fig2", cmd_fig2, "mean delay vs p"),
                                 ("fig3", cmd_fig3, "ASE vs delay frontier")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("--grid", type=int)
        p.set_defaults(func=func)
        if name == "fig2":
            p.add_argument("--lambdas", type=float, nargs="+", help="density columns")
        if name == "fig3":
            p.add_argument("--tol", type=float, default=1e-8)
            p.add_argument("--workers", type=int, default=1)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigurationError, DomainError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (NumericalError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
