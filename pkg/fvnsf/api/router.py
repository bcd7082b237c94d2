"""
Command-line router
Registers every subcommand on one argparse parser
"""

import argparse

from .. import __description__, __version__
from .routes import check, consistency, run, study

ROUTES = (run, study, check, consistency)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fvnsf", description=__description__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", default=None, help="Override FVNSF_LOG_LEVEL")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for route in ROUTES:
        route.register(subparsers)
    return parser
