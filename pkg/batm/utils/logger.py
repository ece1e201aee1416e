"""Logging configuration module for batm.

This module provides a centralized logging setup using loguru, with configuration
support through environment variables. The logger is configured when the module
is imported and writes colored output to standard error, so that standard output
and the run directory stay free for machine-readable artifacts.

Environment Variables:
    BATM_LOG_LEVEL: Sets the logging level (default: INFO).
        Valid values: DEBUG, INFO, SUCCESS, WARNING, ERROR, CRITICAL.

Attributes:
    logger: The configured loguru logger instance used throughout the package.

Example:
    >>> from batm.utils.logger import logger
    >>> logger.info("Training started")
    >>> logger.warning("Skipped 3 malformed lines")
"""

import os
import sys

from dotenv import load_dotenv
from loguru import logger

__all__ = ["logger", "setup_logger"]


def setup_logger(level: str | None = None):
    """Configure the loguru logger with custom formatting and level settings.

    The function loads environment variables from .env files and configures
    the logger to output to stderr with timestamp, level, location and message.

    Args:
        level: Explicit log level. When None, ``BATM_LOG_LEVEL`` is used.
    """
    load_dotenv(override=False)

    log_level = (level or os.getenv("BATM_LOG_LEVEL", "INFO")).upper()

    logger.remove()  # Remove default handler

    logger.add(
        sink=sys.stderr,
        level=log_level,
        backtrace=True,
        format="<green>{time:YYYY-MM-DD HH:mm:ss}</green> | <level>{level}</level> | <cyan>{name}</cyan>:<cyan>{function}</cyan>:<cyan>{line}</cyan> - <level>{message}</level>",
        colorize=True,
    )


# Initialize logger configuration when module is imported
setup_logger()
