"""Logging setup."""

import logging
import sys

from src.shared.config import settings

LOG_FORMAT = "[%(module)-12s] %(levelname)s %(message)s"


def configure_logging(level: str | None = None) -> None:
    """Send engine logs to stderr so stdout carries command output only."""
    root = logging.getLogger("src")
    root.setLevel((level or settings.log_level).upper())
    if not root.handlers:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        root.addHandler(handler)
