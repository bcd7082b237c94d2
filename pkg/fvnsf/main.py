"""
Entry point of the fvnsf command line
"""

import logging
import sys
from typing import List, Optional

from pydantic import ValidationError

from .api import build_parser
from .config import CONFIG
from .exceptions import ConfigError, FVNSFError, MeshError, ThermoDomainError

logger = logging.getLogger(__name__)

EXIT_CONFIG = 2
EXIT_SOLVER = 3


def _report(error: Exception) -> None:
    print(f"error: {type(error).__name__}: {error}", file=sys.stderr)


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    # Setup logging
    logging.basicConfig(
        level=(args.log_level or CONFIG.log_level).upper(),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    )
    logger.info(f"🚀 fvnsf {args.command} starting")

    try:
        return args.handler(args)
    except (ConfigError, ValidationError, MeshError, ThermoDomainError) as e:
        logger.error(f"Configuration rejected: {e}")
        _report(e)
        return EXIT_CONFIG
    except (FVNSFError, ValueError) as e:
        logger.error(f"{args.command} failed: {e}")
        _report(e)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
