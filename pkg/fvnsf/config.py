"""
Runtime settings and configuration-file loading
Environment-driven settings plus the INI reader for run, study and check configs
"""

import configparser
import logging
from pathlib import Path
from typing import Any, Dict, Union

import dotenv
from pydantic import ValidationError
from pydantic_settings import BaseSettings, SettingsConfigDict

from .exceptions import ConfigError
from .models import RunConfig

dotenv.load_dotenv()

logger = logging.getLogger(__name__)


class Settings(BaseSettings):
    model_config = SettingsConfigDict(env_prefix="FVNSF_", env_file=".env", extra="ignore")

    # General Configuration
    log_level: str = "INFO"
    output_dir: str = "output"

    # Worker threads for independent study levels
    threads: int = 1

    # Default seed of the randomized property suite
    seed: int = 20240611


CONFIG = Settings()


def read_ini(path: Union[str, Path]) -> Dict[str, Dict[str, Any]]:
    """
    Read a sectioned key-value file into nested dictionaries

    Args:
        path: INI file location

    Returns:
        Mapping of section name to its key-value pairs
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")

    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    parser.optionxform = str  # keys are case-sensitive (N vs n)
    try:
        parser.read(path, encoding="utf-8")
    except configparser.Error as e:
        logger.error(f"Could not parse {path}: {e}")
        raise ConfigError(f"{path}: {e}") from e

    return {section: dict(parser.items(section)) for section in parser.sections()}


def load_run_config(path: Union[str, Path]) -> RunConfig:
    """
    Load and validate a configuration file

    Args:
        path: INI file location

    Returns:
        Validated RunConfig; unknown sections or keys are rejected
    """
    raw = read_ini(path)
    try:
        config = RunConfig.model_validate(raw)
    except ValidationError as e:
        problems = "; ".join(
            f"{'.'.join(str(part) for part in error['loc'])}: {error['msg']}" for error in e.errors()
        )
        logger.error(f"Invalid configuration {path}: {problems}")
        raise ConfigError(problems) from e

    logger.info(f"Loaded configuration from {path}")
    return config
