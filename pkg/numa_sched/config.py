"""
Process-level settings for numa-sched, read from the environment and .env
"""
import logging
import os
from dataclasses import dataclass

from dotenv import load_dotenv

from numa_sched.exceptions import InvalidInputError

logger = logging.getLogger(__name__)

DEFAULT_ORACLE_BOUND = 10 ** 7
DEFAULT_ENUMERATION_BOUND = 10 ** 7

_LOG_LEVELS = ("CRITICAL", "ERROR", "WARNING", "INFO", "DEBUG")


@dataclass(frozen=True)
class Settings:
    """Settings that are not part of an experiment's identity"""
    log_level: str = "INFO"
    workers: int = 1
    oracle_bound: int = DEFAULT_ORACLE_BOUND
    enumeration_bound: int = DEFAULT_ENUMERATION_BOUND


def _positive_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        raise InvalidInputError(f"{name} must be an integer, got {raw!r}")
    if value < 1:
        raise InvalidInputError(f"{name} must be >= 1, got {value}")
    return value


def load_settings() -> Settings:
    """
    Load settings, honouring a .env file in the working directory

    Returns:
        Settings built from NUMASCHED_* variables
    """
    load_dotenv()

    log_level = os.getenv("NUMASCHED_LOG_LEVEL", "INFO").strip().upper()
    if log_level not in _LOG_LEVELS:
        raise InvalidInputError(
            f"NUMASCHED_LOG_LEVEL must be one of {', '.join(_LOG_LEVELS)}, got {log_level!r}")

    settings = Settings(
        log_level=log_level,
        workers=_positive_int("NUMASCHED_WORKERS", 1),
        oracle_bound=_positive_int("NUMASCHED_ORACLE_BOUND", DEFAULT_ORACLE_BOUND),
        enumeration_bound=_positive_int(
            "NUMASCHED_ENUMERATION_BOUND", DEFAULT_ENUMERATION_BOUND),
    )
    logger.debug(f"Loaded settings: {settings}")
    return settings
