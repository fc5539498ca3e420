"""
Logging configuration.

@help.category Utilities
@help.title Logging Setup
@help.description Configures the root logger once from the log_level setting.
Modules log through logging.getLogger(__name__).
"""
import logging
from typing import Optional

from src.config.settings import get_settings

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def configure_logging(level: Optional[str] = None) -> None:
    """Install a stream handler on the root logger at ``level`` (defaults to settings)."""
    level_name = (level or get_settings().log_level).upper()
    numeric = logging.getLevelName(level_name)
    if not isinstance(numeric, int):
        raise ValueError(f"Unknown log level: {level_name}")
    root = logging.getLogger()
    if not any(getattr(h, "_resolv_handler", False) for h in root.handlers):
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        handler._resolv_handler = True  # type: ignore[attr-defined]
        root.addHandler(handler)
    root.setLevel(numeric)
