"""
study: convergence rates against a finer reference run
"""

import argparse
import logging
from pathlib import Path

from ...config import load_run_config
from ...plugin.analysis.convergence import run_study
from ...plugin.reports.export import EOC_FIELDS, eoc_rows, write_csv
from .common import output_dir

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("study", help="Run a convergence study and write eoc.csv")
    parser.add_argument("--config", required=True, type=Path, help="INI configuration file with a [study] section")
    parser.add_argument("--out", type=Path, default=None, help="Output directory")
    parser.set_defaults(handler=study_command)


def study_command(args: argparse.Namespace) -> int:
    config = load_run_config(args.config)
    table = run_study(config)
    write_csv(output_dir(args, config) / "eoc.csv", EOC_FIELDS, eoc_rows(table))
    logger.info(f"Study note: {table.note}")
    return 0
