"""
consistency: weak-form defects over the built-in test functions
"""

import argparse
import logging
from pathlib import Path

from ...config import load_run_config
from ...exceptions import SolverError, StudyError
from ...models import level_dt
from ...plugin.analysis.consistency import builtin_test_functions, consistency_residuals
from ...plugin.analysis.convergence import simulate
from ...plugin.reports.export import CONSISTENCY_FIELDS, consistency_row, write_csv
from .common import output_dir

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("consistency", help="Measure consistency defects and write consistency.csv")
    parser.add_argument("--config", required=True, type=Path, help="INI configuration file with a [consistency] section")
    parser.add_argument("--out", type=Path, default=None, help="Output directory")
    parser.set_defaults(handler=consistency_command)


def consistency_command(args: argparse.Namespace) -> int:
    config = load_run_config(args.config)
    section = config.section("consistency")
    tau = section.tau if section.tau is not None else config.section("time").t_end

    rows = []
    for N in section.levels:
        dt = level_dt(section.dt_rule, section.dt_factor, 1.0 / N)
        try:
            params, history = simulate(config, N, dt)
        except SolverError as e:
            raise StudyError(str(e), level=N) from e
        reports = [consistency_residuals(history, phi, params, tau) for phi in builtin_test_functions()]
        rows.append(consistency_row(reports))
        logger.info(f"Level N={N}: e_rho={rows[-1]['e_rho']:.3e} e_s_signed={rows[-1]['e_s_signed']:.3e}")

    write_csv(output_dir(args, config) / "consistency.csv", CONSISTENCY_FIELDS, rows)
    return 0
