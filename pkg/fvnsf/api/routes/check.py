"""
check: randomized invariant suite
"""

import argparse
import logging
from pathlib import Path

from ...config import CONFIG, load_run_config
from ...plugin.analysis.properties import run_property_suite

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("check", help="Run the randomized invariant suite")
    parser.add_argument("--config", type=Path, default=None, help="Optional INI file with a [check] section")
    parser.add_argument("--seed", type=int, default=None, help="Override the random seed")
    parser.set_defaults(handler=check_command)


def check_command(args: argparse.Namespace) -> int:
    """Print pass/fail per property; nonzero exit if any fails"""
    seed, trials = CONFIG.seed, 100
    if args.config is not None:
        section = load_run_config(args.config).check
        if section is not None:
            seed = section.seed if section.seed is not None else seed
            trials = section.trials
    if args.seed is not None:
        seed = args.seed

    logger.info(f"Property suite with seed {seed}, {trials} trials")
    results = run_property_suite(seed, trials)
    for result in results:
        print(result.line())

    failed = [result.name for result in results if not result.passed]
    if failed:
        print(f"❌ {len(failed)} of {len(results)} properties failed: {', '.join(failed)}")
        return 1
    print(f"✅ all {len(results)} properties passed")
    return 0
