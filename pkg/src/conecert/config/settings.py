"""Runtime configuration for conecert.

Settings come from environment variables, optionally seeded from a
``.env`` file. Values already present in the environment win over the file.

Recognised variables:
- CONECERT_LOG_LEVEL: logging level name for the command line (default WARNING)
- CONECERT_MAX_PIVOTS: simplex pivot guard per phase (default 50000)
- CONECERT_FLOAT_DIGITS: significant digits of approximate report values (default 12)
"""

from dataclasses import dataclass
from typing import Mapping, Optional
import logging
import os

from dotenv import load_dotenv


DEFAULT_LOG_LEVEL = "WARNING"
DEFAULT_MAX_PIVOTS = 50000
DEFAULT_FLOAT_DIGITS = 12


@dataclass(frozen=True)
class Settings:
    """Resolved configuration.

    Attributes:
        log_level: Name of the logging level
        max_pivots: Pivot guard per simplex phase
        float_digits: Significant digits for approximate values in reports
    """
    log_level: str = DEFAULT_LOG_LEVEL
    max_pivots: int = DEFAULT_MAX_PIVOTS
    float_digits: int = DEFAULT_FLOAT_DIGITS


def _positive_int(env: Mapping[str, str], name: str, default: int) -> int:
    raw = env.get(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"{name} must be an integer, got {raw!r}") from None
    if value <= 0:
        raise ValueError(f"{name} must be positive, got {value}")
    return value


def load_settings(
    env: Optional[Mapping[str, str]] = None,
    dotenv_path: Optional[str] = None,
) -> Settings:
    """Resolve settings from the environment.

    Args:
        env: Mapping to read instead of ``os.environ`` (no .env loading then)
        dotenv_path: Explicit .env file; the default search is used when None

    Returns:
        The resolved Settings

    Raises:
        ValueError: If a variable holds an invalid value
    """
    if env is None:
        load_dotenv(dotenv_path=dotenv_path, override=False)
        env = os.environ

    level = env.get("CONECERT_LOG_LEVEL", DEFAULT_LOG_LEVEL).strip().upper() or DEFAULT_LOG_LEVEL
    if not isinstance(logging.getLevelName(level), int):
        raise ValueError(f"CONECERT_LOG_LEVEL is not a logging level: {level!r}")

    return Settings(
        log_level=level,
        max_pivots=_positive_int(env, "CONECERT_MAX_PIVOTS", DEFAULT_MAX_PIVOTS),
        float_digits=_positive_int(env, "CONECERT_FLOAT_DIGITS", DEFAULT_FLOAT_DIGITS),
    )
