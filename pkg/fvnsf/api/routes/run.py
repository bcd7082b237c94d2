"""
run: one simulation with per-step diagnostics
"""

import argparse
import logging
from pathlib import Path

from ...config import load_run_config
from ...exceptions import ConfigError
from ...plugin.analysis.diagnostics import DiagnosticsRecorder
from ...plugin.discrete.mesh import build_grid
from ...plugin.reports.export import TIMESERIES_FIELDS, timeseries_rows, write_csv
from ...plugin.solver.presets import build_preset
from ...plugin.solver.scheme import initial_state, run
from .common import output_dir

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("run", help="Run one simulation and write timeseries.csv")
    parser.add_argument("--config", required=True, type=Path, help="INI configuration file")
    parser.add_argument("--out", type=Path, default=None, help="Output directory")
    parser.set_defaults(handler=run_command)


def run_command(args: argparse.Namespace) -> int:
    """Simulate the configured initial data and write timeseries.csv"""
    config = load_run_config(args.config)
    time = config.section("time")
    if time.dt is None:
        raise ConfigError("time.dt: required for the run command")

    grid = build_grid(config.grid.d, config.grid.N)
    params = config.scheme_params(grid.h, time.dt)
    preset = build_preset(config.ic)
    start = initial_state(preset.rho, preset.u, preset.theta, grid, params)

    recorder = DiagnosticsRecorder(params, record_every=config.output.record_every)
    run(start, params, time.t_end, observers=[recorder])

    target = output_dir(args, config) / "timeseries.csv"
    write_csv(target, TIMESERIES_FIELDS, timeseries_rows(recorder.records))
    logger.info(f"✅ Run finished, realised window rho in [{recorder.window.rho_min:.6g}, {recorder.window.rho_max:.6g}]")
    return 0
