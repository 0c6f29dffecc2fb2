#!/usr/bin/env python3
"""
Two-Crystal OPO Simulator

Command-line entry point: noise and criteria sweeps, threshold and steady-state
reports, reference figures and the closed-form validation run.
"""

import argparse
import logging
import os
import sys

from twocrystal_opo import (
    EXIT_CONFIG,
    EXIT_NUMERIC,
    EXIT_OK,
    OpoError,
    UsageError,
    apply_overrides,
    figure,
    load_config,
    load_env_settings,
    log_mancini,
    log_performance_summary,
    run_sweep,
    setup_logging,
    steady_state_report,
    threshold_report,
    validate,
    write_rows,
)
from twocrystal_opo.models import CurveSpec

SPECTRA_CURVES = (CurveSpec('S_p'), CurveSpec('S_q'), CurveSpec('S_r'), CurveSpec('S_s'),
                  CurveSpec('S_S1p'), CurveSpec('S_S2m'))
CRITERIA_CURVES = (CurveSpec('sum_crit', label='sum'), CurveSpec('epr_crit', label='EPR'),
                   CurveSpec('prod_crit', label='half product', scale=0.5))


class CliParser(argparse.ArgumentParser):
    """ArgumentParser that reports bad usage as UsageError instead of exiting."""

    def error(self, message):
        raise UsageError(message)


def _float_list(text):
    try:
        return tuple(float(item) for item in text.split(',') if item.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated numbers, got {text!r}")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', help='Run file (defaults to OPO_CONFIG_PATH)')
    common.add_argument('--sigma', type=_float_list, help='Pump parameter(s), comma separated')
    common.add_argument('--coupling', type=_float_list, help='Normalized coupling(s) c, comma separated')
    common.add_argument('--omega-min', type=float)
    common.add_argument('--omega-max', type=float)
    common.add_argument('--omega-points', type=int)
    common.add_argument('--pump-variance', type=float)
    common.add_argument('--output', help='Output file (directory for figure)')
    common.add_argument('--format', choices=('csv', 'svg'))
    common.add_argument('--workers', type=int, help='Worker threads (defaults to OPO_MAX_WORKERS)')
    common.add_argument('--verbose', action='store_true', help='Show DEBUG messages on the console')

    parser = CliParser(description='Two-crystal self-phase-locked OPO simulator')
    commands = parser.add_subparsers(dest='command', required=True, parser_class=CliParser)
    commands.add_parser('spectra', parents=[common], help='Quadrature and Stokes noise spectra')
    commands.add_parser('criteria', parents=[common], help='Entanglement criteria spectra')
    commands.add_parser('threshold', parents=[common], help='Oscillation threshold branches')
    commands.add_parser('steady-state', parents=[common], help='Above-threshold steady state')
    figure_parser = commands.add_parser('figure', parents=[common], help='Reproduce a reference figure')
    figure_parser.add_argument('--id', type=int, required=True, dest='figure_id')
    validate_parser = commands.add_parser('validate', parents=[common], help='Closed-form validation')
    validate_parser.add_argument('--strict', action='store_true',
                                 help='Treat documented deviations as failures')
    return parser


def run_command(args, env):
    """Dispatch one parsed command and return its exit code."""
    config = apply_overrides(
        load_config(args.config or env.config_path),
        sigma=args.sigma,
        coupling=args.coupling,
        omega_min=args.omega_min,
        omega_max=args.omega_max,
        omega_points=args.omega_points,
        pump_variance=args.pump_variance,
        output=None if args.command in ('figure', 'validate') else args.output,
        output_format=args.format,
    )
    workers = args.workers or env.max_workers

    if args.command == 'spectra':
        write_rows(run_sweep(config, max_workers=workers), config, curves=SPECTRA_CURVES)
    elif args.command == 'criteria':
        rows = run_sweep(config, max_workers=workers)
        log_mancini(rows, config)
        write_rows(rows, config, curves=CRITERIA_CURVES)
    elif args.command == 'threshold':
        report = threshold_report(config)
        print(f"lower threshold  {report['lower']!r}  residual {report['residual_lower']:.3e}")
        print(f"upper threshold  {report['upper']!r}  residual {report['residual_upper']:.3e}")
    elif args.command == 'steady-state':
        report = steady_state_report(config)
        print(f"sigma            {report['sigma']!r}")
        print(f"J                {report['J']!r}")
        for name, value in zip(('a1', 'b2*', 'a2', 'b1*'), report['amplitudes']):
            print(f"{name:<16} {value!r}")
        print(f"output power     {report['output_power']!r}")
        for beam in ('a', 'b'):
            s = report[f'stokes_{beam}']
            print(f"Stokes {beam}         S0={s.s0!r} S1={s.s1!r} S2={s.s2!r} S3={s.s3!r}")
        print(f"Heisenberg bound {report['heisenberg_bound']!r}")
    elif args.command == 'figure':
        csv_path, svg_path = figure(args.figure_id, args.output or env.output_dir,
                                    base_config=config, max_workers=workers)
        print(csv_path)
        print(svg_path)
    elif args.command == 'validate':
        report_path = args.output or os.path.join(env.output_dir, 'validation_report.txt')
        outcome = validate(config, report_path, strict=args.strict, max_workers=workers)
        print(outcome.report_path)
        return outcome.exit_code
    return EXIT_OK


def main(argv=None):
    """Main entry point for the two-crystal OPO simulator."""
    try:
        args = build_parser().parse_args(argv)
        env = load_env_settings()
    except OpoError as e:
        print(f"{type(e).__name__}: {e}", file=sys.stderr)
        return e.exit_code

    logger = setup_logging(env.log_dir, console_level=logging.DEBUG if args.verbose else logging.INFO)
    try:
        logger.info(f"Running command: {args.command}")
        return run_command(args, env)
    except OpoError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return e.exit_code
    except OSError as e:
        logger.error(f"I/O error: {e}")
        return EXIT_CONFIG
    except KeyboardInterrupt:
        logger.info("Run interrupted by user")
        return EXIT_CONFIG
    except Exception:
        logger.exception("Fatal error in main program")
        return EXIT_NUMERIC
    finally:
        log_performance_summary()


if __name__ == "__main__":
    sys.exit(main())
