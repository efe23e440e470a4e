"""
Command Line Module

Entry point of the simulator with four subcommands:
- simulate: one campaign from a config file and/or flags, CSV/SVG output
- sweep: one run per sweep value, metrics table and I(t) overlay chart
- figures: the twelve beta/gamma/seed panels as CSV + SVG pairs
- check: invariant suite, exit 0 iff every check passes

Exit codes: 0 success, 1 run or output failure, 2 invalid flags or config.
Standard output carries results only; diagnostics go to the log.
"""

import os
import sys
import logging
import argparse
from typing import List, Optional

from checks.invariant_checker import InvariantChecker
from config.run_config import CONFIG_KEYS, ConfigError, RunConfig, build_config, read_config_entries
from config.settings import Settings, load_settings
from core.campaign import (
    CampaignMetrics,
    ScenarioError,
    ScenarioRunError,
    SeedEfficiencyError,
    SweepParameter,
    figure_presets,
    metrics,
    run_scenario,
    scenario_from_config,
    seed_efficiency,
    sweep,
    sweep_from_config,
)
from core.integrator import IntegrationError
from core.sir_model import ModelDomainError
from exporters.csv_writer import write_csv, write_metrics_csv, write_text_file
from exporters.svg_chart import ChartError, sir_series, write_svg_chart
from utils.logger import ConsoleLogger, setup_logging

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


def format_summary(m: CampaignMetrics) -> str:
    """One stable line: R0, classification, peak, peak time and reach"""
    r0 = 'undefined' if m.r0 is None else f"{m.r0:g}"
    classification = m.classification.value if m.classification is not None else 'undefined'
    return (
        f"R0={r0} classification={classification} peak={m.peak_sharers:.4f} "
        f"t_peak={m.t_peak:.4f} reach={m.cumulative_reach:.4f} reach_fraction={m.reach_fraction:.6f}"
    )


def _add_run_flags(parser: argparse.ArgumentParser):
    # Flags mirror config keys; values stay text so they share the config validation path
    parser.add_argument('--config', metavar='PATH', help='run configuration file (key = value lines)')
    parser.add_argument('--beta', help='infectivity')
    parser.add_argument('--gamma', help='recovery rate')
    parser.add_argument('--s0', help='initial susceptible')
    parser.add_argument('--i0', help='initial sharers (seed)')
    parser.add_argument('--r0', help='initial recovered')
    parser.add_argument('--t-end', dest='t_end', help='time horizon (default 100)')
    parser.add_argument('--samples', dest='n_samples', help='number of samples (default 1001)')
    parser.add_argument('--out-csv', dest='out_csv', metavar='PATH')
    parser.add_argument('--out-svg', dest='out_svg', metavar='PATH')


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='viral-campaign',
        description='SIR simulator for viral marketing campaigns',
    )
    parser.add_argument('--log-level', dest='log_level', default=None,
                        choices=['DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'],
                        help='overrides LOG_LEVEL')
    subparsers = parser.add_subparsers(dest='command', metavar='COMMAND')
    subparsers.required = True

    simulate = subparsers.add_parser('simulate', help='run one campaign')
    _add_run_flags(simulate)
    simulate.set_defaults(handler=cmd_simulate, command_parser=simulate)

    sweep_parser = subparsers.add_parser('sweep', help='run one campaign per sweep value')
    _add_run_flags(sweep_parser)
    sweep_parser.add_argument('--sweep-param', dest='sweep_param', choices=[p.value for p in SweepParameter])
    sweep_parser.add_argument('--sweep-values', dest='sweep_values', metavar='V1,V2,...')
    sweep_parser.set_defaults(handler=cmd_sweep, command_parser=sweep_parser)

    figures = subparsers.add_parser('figures', help='write the beta, gamma and seed panels')
    figures.add_argument('out_dir', nargs='?', default='figures', help='output directory (default: figures)')
    figures.set_defaults(handler=cmd_figures, command_parser=figures)

    check = subparsers.add_parser('check', help='run the invariant suite')
    check.add_argument('-v', '--verbose', action='store_true', help='print every check with its residual')
    check.add_argument('--report', metavar='PATH', help='write a JSON report')
    check.set_defaults(handler=cmd_check, command_parser=check)

    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    """Config file values overridden by flags, validated once"""
    values, lines = {}, {}
    if args.config:
        try:
            with open(args.config, 'r', encoding='utf-8') as f:
                text = f.read()
        except OSError as e:
            raise ConfigError(f"cannot read config file {args.config}: {e}") from e
        values, lines = read_config_entries(text)

    for key in CONFIG_KEYS:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
            lines.pop(key, None)
    return build_config(values, lines)


def cmd_simulate(args, settings: Settings, out) -> int:
    config = config_from_args(args)
    scn = scenario_from_config(config)
    traj = run_scenario(scn, settings.step_control())
    m = metrics(traj)

    if config.out_csv:
        write_text_file(config.out_csv, write_csv(traj))
    if config.out_svg:
        title = f"beta={config.beta:g} gamma={config.gamma:g} I(0)={config.i0:g}"
        write_text_file(config.out_svg, write_svg_chart(sir_series(traj), title))

    print(format_summary(m), file=out)
    logger.info(f"✅ Simulation done: {traj.steps_taken} steps, {traj.steps_rejected} rejected")
    return EXIT_OK


def cmd_sweep(args, settings: Settings, out) -> int:
    config = config_from_args(args)
    if config.sweep_param is None:
        raise ConfigError("missing required keys: sweep_param, sweep_values")
    spec = sweep_from_config(config)
    control = settings.step_control()
    results = sweep(spec, control, workers=settings.sweep_workers)
    labels = [f"{spec.parameter.value}={value:g}" for value in spec.values]

    for label, result in zip(labels, results):
        if result.ok:
            print(f"{label} {format_summary(result.metrics)}", file=out)
        else:
            print(f"{label} error={result.error}", file=out)

    exit_code = EXIT_OK if all(result.ok for result in results) else EXIT_FAILURE

    if spec.parameter == SweepParameter.SEED:
        try:
            for row in seed_efficiency(spec, control, results):
                marginal = 'n/a' if row.marginal_reach_per_seed is None else f"{row.marginal_reach_per_seed:.4f}"
                shift = 'n/a' if row.t_peak_shift is None else f"{row.t_peak_shift:.4f}"
                print(
                    f"seed={row.value:g} reach_fraction={row.reach_fraction:.6f} t_peak={row.t_peak:.4f} "
                    f"marginal_reach_per_seed={marginal} t_peak_shift={shift}",
                    file=out,
                )
        except SeedEfficiencyError as e:
            logger.warning(f"⚠️ Seed efficiency skipped: {e}")
            exit_code = EXIT_FAILURE

    if config.out_csv:
        write_text_file(config.out_csv, write_metrics_csv(results, labels))
    if config.out_svg:
        series = [(label, result.trajectory.times, result.trajectory.i)
                  for label, result in zip(labels, results) if result.ok]
        if series:
            title = f"I(t) over {spec.parameter.value}"
            write_text_file(config.out_svg, write_svg_chart(series, title))
        else:
            logger.warning("⚠️ No successful runs to chart")
    return exit_code


def cmd_figures(args, settings: Settings, out) -> int:
    out_dir = args.out_dir
    os.makedirs(out_dir, exist_ok=True)
    control = settings.step_control()
    exit_code = EXIT_OK

    for spec in figure_presets():
        results = sweep(spec, control, workers=settings.sweep_workers)
        for index, result in enumerate(results):
            panel = spec.panel_label(index)
            caption = f"{spec.parameter.value}={result.value:g}"
            if not result.ok:
                logger.error(f"❌ {panel} failed: {result.error}")
                print(f"{panel} {caption} error={result.error}", file=out)
                exit_code = EXIT_FAILURE
                continue
            traj = result.trajectory
            write_text_file(os.path.join(out_dir, f"{panel}.csv"), write_csv(traj))
            write_text_file(os.path.join(out_dir, f"{panel}.svg"),
                            write_svg_chart(sir_series(traj), f"{panel}: {caption}"))
            print(f"{panel} {caption} {format_summary(result.metrics)}", file=out)
        logger.info(f"📊 {spec.name}: {len(results)} panels written to {out_dir}")
    return exit_code


def cmd_check(args, settings: Settings, out) -> int:
    checker = InvariantChecker(console=ConsoleLogger(stream=out), verbose=args.verbose,
                               control=settings.step_control())
    ok = checker.run_all()
    if args.report and not checker.save_report(args.report):
        return EXIT_FAILURE
    return EXIT_OK if ok else EXIT_FAILURE


def main(argv: Optional[List[str]] = None, out=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    try:
        settings = load_settings()
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    try:
        setup_logging(args.log_level or settings.log_level, settings.log_file)
    except OSError as e:
        print(f"error: cannot open log file: {e}", file=sys.stderr)
        return EXIT_FAILURE

    if out is None:
        out = sys.stdout
    try:
        return args.handler(args, settings, out)
    except ConfigError as e:
        args.command_parser.print_usage(sys.stderr)
        print(f"{args.command_parser.prog}: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (ScenarioRunError, IntegrationError, ModelDomainError, ScenarioError, ChartError) as e:
        logger.error(f"❌ {args.command} failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAILURE
    except OSError as e:
        logger.error(f"❌ {args.command} could not write output: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAILURE
