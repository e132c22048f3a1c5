"""
Command line entry point for the weighted sparsity toolkit.

Usage:
    wsr run --config data/scenarios/intro.json --out results/intro
    wsr run --config a.json --config b.json --out results --jobs 2
    wsr verify --suite all
    wsr sweep-overlap --config data/scenarios/overlap_sweep.json
    wsr compare --config data/scenarios/adjacent_gap.json --schemes identity,trunc_pinv
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

sys.path.insert(0, str(Path(__file__).parent))

import settings
from models import WeightedSparsityError
from experiments import (
    load_scenario,
    run_scenario,
    run_many,
    compare_schemes,
    sweep_overlap,
    run_suite,
    SUITES,
)

logger = logging.getLogger('wsr')


def _scenario_path(value: str) -> Path:
    """Resolve a --config value, falling back to the bundled scenario directory."""
    path = Path(value)
    if path.exists():
        return path
    for candidate in (settings.scenario_dir() / value, settings.scenario_dir() / f'{value}.json'):
        if candidate.exists():
            return candidate
    return path


def _configure_logging(verbose: bool) -> None:
    level = logging.DEBUG if verbose else getattr(logging, settings.log_level(), logging.INFO)
    logging.basicConfig(
        level=level,
        format='%(asctime)s %(levelname)s %(name)s: %(message)s',
        stream=sys.stderr,
    )


def _cmd_run(args) -> int:
    configs = [load_scenario(_scenario_path(value)) for value in args.config]

    if len(configs) == 1:
        cfg = configs[0]
        out_dir = Path(args.out) if args.out else None
        artifacts = run_scenario(cfg, out_dir, verbose=args.verbose)
        print(json.dumps(artifacts.to_dict(), indent=2, default=str))
        return 0

    out_root = Path(args.out) if args.out else settings.output_dir()
    outcomes = run_many(configs, out_root, jobs=args.jobs, verbose=args.verbose)
    failed = 0
    for outcome in outcomes:
        if outcome.ok:
            print(f"{outcome.name}: ok ({outcome.artifacts['output_dir']})")
        else:
            failed += 1
            print(f"{outcome.name}: FAILED {outcome.error}", file=sys.stderr)
    return 1 if failed else 0


def _cmd_verify(args) -> int:
    results = run_suite(args.suite)
    width = max(len(r.name) for r in results) if results else 0
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.name:<{width}}  {r.detail}")

    failures = [r for r in results if not r.passed]
    print(f"\n{len(results) - len(failures)}/{len(results)} checks passed")
    return 1 if failures else 0


def _cmd_sweep_overlap(args) -> int:
    cfg = load_scenario(_scenario_path(args.config))
    out_dir = Path(args.out) if args.out else settings.output_dir() / cfg.name
    summary = sweep_overlap(cfg, out_dir, verbose=args.verbose)
    print(json.dumps(summary, indent=2, default=str))
    return 0


def _cmd_compare(args) -> int:
    cfg = load_scenario(_scenario_path(args.config))
    schemes = [s.strip() for s in args.schemes.split(',') if s.strip()]
    out_dir = Path(args.out) if args.out else settings.output_dir() / cfg.name
    runs = compare_schemes(cfg, schemes, out_dir, verbose=args.verbose)
    for name, artifacts in runs.items():
        summary = artifacts.summary
        print(f"{name:<14} objective={summary.objective:.6g}  support={summary.support}  "
              f"localization={summary.localization_error_cells}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='wsr',
        description='Weighted sparsity regularization for inverse source problems',
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  wsr run --config data/scenarios/intro.json --out results/intro
  wsr verify --suite lemmas
  wsr sweep-overlap --config overlap_sweep
  wsr compare --config adjacent_gap --schemes identity,trunc_pinv,random_sparse

For more information, see README.md
        """
    )
    parser.add_argument(
        '--verbose',
        action='store_true',
        help='Show detailed processing steps'
    )
    # --verbose is also accepted after the subcommand
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--verbose', action='store_true', default=argparse.SUPPRESS,
                        help='Show detailed processing steps')
    sub = parser.add_subparsers(dest='command', required=True)

    run = sub.add_parser('run', parents=[common], help='Run one or more scenarios')
    run.add_argument('--config', action='append', required=True, metavar='FILE',
                     help='Scenario file (repeatable)')
    run.add_argument('--out', metavar='DIR', help='Output directory')
    run.add_argument('--jobs', type=int, default=1, help='Worker processes for several scenarios')
    run.set_defaults(handler=_cmd_run)

    verify = sub.add_parser('verify', parents=[common], help='Run the numerical verification suites')
    verify.add_argument('--suite', choices=SUITES + ('all',), default='all')
    verify.set_defaults(handler=_cmd_verify)

    sweep = sub.add_parser('sweep-overlap', parents=[common], help='Overlap ratio sweep over the threshold')
    sweep.add_argument('--config', required=True, metavar='FILE')
    sweep.add_argument('--out', metavar='DIR')
    sweep.set_defaults(handler=_cmd_sweep_overlap)

    compare = sub.add_parser('compare', parents=[common], help='Invert one observation with several choices of B')
    compare.add_argument('--config', required=True, metavar='FILE')
    compare.add_argument('--schemes', default='identity,trunc_pinv,random_sparse')
    compare.add_argument('--out', metavar='DIR')
    compare.set_defaults(handler=_cmd_compare)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point; returns the process exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging(args.verbose)

    try:
        code = args.handler(args)
    except (WeightedSparsityError, OSError, ValueError) as e:
        print(f"wsr: error: {type(e).__name__}: {e}", file=sys.stderr)
        if args.verbose:
            logger.exception("Command failed")
        code = 1
    return code


if __name__ == '__main__':
    sys.exit(main())
