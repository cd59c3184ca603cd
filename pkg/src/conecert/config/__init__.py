"""Environment-driven configuration."""

from src.conecert.config.settings import (
    Settings,
    load_settings,
    DEFAULT_LOG_LEVEL,
    DEFAULT_MAX_PIVOTS,
    DEFAULT_FLOAT_DIGITS,
)

__all__ = [
    "Settings",
    "load_settings",
    "DEFAULT_LOG_LEVEL",
    "DEFAULT_MAX_PIVOTS",
    "DEFAULT_FLOAT_DIGITS",
]
