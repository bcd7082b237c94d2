"""
Helpers shared by the subcommands
"""

import argparse
from pathlib import Path

from ...config import CONFIG
from ...models import RunConfig


def output_dir(args: argparse.Namespace, config: RunConfig) -> Path:
    """--out, then the [output] directory of the config, then FVNSF_OUTPUT_DIR"""
    if getattr(args, "out", None) is not None:
        return Path(args.out)
    if config.output.directory is not None:
        return Path(config.output.directory)
    return Path(CONFIG.output_dir)
