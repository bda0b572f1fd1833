import asyncio
import argparse
import logging
import sys
from typing import List, Optional

from features.experiments import moment_reports, parse_scenario, run_scenario
from features.experiments.scenario import Scenario
from features.shared.errors import ConfigError, IrsBeamError
from config.settings import Settings

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2


def describe(scenario: Scenario) -> str:
    """Human-readable summary of a parsed scenario"""
    c = scenario.config
    sweep = "none"
    if scenario.sweep is not None:
        sweep = f"{scenario.sweep.variable} in [{', '.join(f'{v:g}' for v in scenario.sweep.values)}]"
    return "\n".join([
        f"Scenario {scenario.source_name} (sha256 {scenario.source_digest[:12]})",
        f"  kind: {scenario.kind}",
        f"  sweep: {sweep}",
        f"  M={c.M}, N={c.N}, P={c.P_dbm:g} dBm, K=({c.K0:g}, {c.K1:g}, {c.K2:g})",
        f"  trials: {scenario.trials}, seed: {scenario.seed}, init: {scenario.init}",
        f"  output: {scenario.output_path}",
    ])


async def run_command(args) -> int:
    scenario = parse_scenario(args.scenario, seed=args.seed, trials=args.trials, output=args.out)
    print(describe(scenario))
    path = await run_scenario(scenario)
    print(f"Wrote results to {path}")
    return EXIT_OK


async def validate_command(args) -> int:
    scenario = parse_scenario(args.scenario)
    print(describe(scenario))
    print(f"OK: {len(scenario.sweep_points())} sweep point(s)")
    return EXIT_OK


async def moments_command(args) -> int:
    scenario = parse_scenario(args.scenario, seed=args.seed, trials=args.trials)
    print(describe(scenario))
    for value, report in await moment_reports(scenario):
        if scenario.sweep is not None:
            print(f"\n{scenario.sweep.variable} = {value:g}")
        print(f"\nTrials: {report.trials}, seed: {report.master_seed}")
        print(report.to_frame().to_string(index=False, float_format=lambda x: f"{x:.6g}"))
        print(f"Sum identity error: {report.sum_identity_error:.3g}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='irsbeam',
                                     description='IRS-assisted MISO beamforming experiments')
    commands = parser.add_subparsers(dest='command', required=True)

    run = commands.add_parser('run', help='Run a scenario and write its CSV')
    run.add_argument('--scenario', required=True, help='Scenario file')
    run.add_argument('--seed', type=int, default=None, help='Override the scenario seed')
    run.add_argument('--out', default=None, help='Output CSV path')
    run.add_argument('--trials', type=int, default=None, help='Override the Monte Carlo trial count')
    run.set_defaults(handler=run_command)

    validate = commands.add_parser('validate', help='Parse a scenario file without running it')
    validate.add_argument('--scenario', required=True, help='Scenario file')
    validate.set_defaults(handler=validate_command)

    moments = commands.add_parser('moments', help='Print the moment check table for a scenario')
    moments.add_argument('--scenario', required=True, help='Scenario file')
    moments.add_argument('--seed', type=int, default=None, help='Override the scenario seed')
    moments.add_argument('--trials', type=int, default=None, help='Override the Monte Carlo trial count')
    moments.set_defaults(handler=moments_command)
    return parser


def configure_logging() -> None:
    level = logging.getLevelName(Settings.LOG_LEVEL)
    if not isinstance(level, int):
        raise ConfigError(f"IRSBEAM_LOG_LEVEL is not a logging level: {Settings.LOG_LEVEL!r}")
    logging.basicConfig(level=level, format='%(asctime)s - %(levelname)s - %(message)s')


async def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        configure_logging()
        return await args.handler(args)
    except ConfigError as e:
        print(f"Configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (IrsBeamError, OSError, FloatingPointError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_RUNTIME


def cli():
    sys.exit(asyncio.run(main()))


if __name__ == "__main__":
    cli()
