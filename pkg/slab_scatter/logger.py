"""Logging configuration for the slab scattering library.

All modules log through children of the ``slab_scatter`` logger, so one call
to :func:`setup_logger` (made by the CLI once arguments are parsed) decides
level and destinations for the whole package.
"""

import logging
import sys
from typing import Optional, Union

from .config import config

ROOT_NAME = "slab_scatter"
DEFAULT_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def setup_logger(
    level: Optional[Union[int, str]] = None,
    log_file: Optional[str] = None,
    log_format: str = DEFAULT_FORMAT,
) -> logging.Logger:
    """Configure the package logger.

    Args:
        level: Logging level; defaults to ``SCATTER_LOG_LEVEL`` (``WARNING``).
        log_file: Optional extra destination; defaults to ``SCATTER_LOG_FILE``.
        log_format: Format string for log messages.

    Returns:
        The ``slab_scatter`` logger. Module loggers obtained from
        :func:`get_logger` keep working after reconfiguration.
    """
    package_logger = logging.getLogger(ROOT_NAME)
    package_logger.setLevel(level if level is not None else config.log_level)
    package_logger.propagate = False

    for handler in list(package_logger.handlers):
        package_logger.removeHandler(handler)
        handler.close()

    formatter = logging.Formatter(log_format)

    # stdout carries CSV/JSON output, so diagnostics go to stderr
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setFormatter(formatter)
    package_logger.addHandler(console_handler)

    log_file = log_file or config.log_file
    if log_file:
        file_handler = logging.FileHandler(log_file, encoding="utf-8")
        file_handler.setFormatter(formatter)
        package_logger.addHandler(file_handler)

    return package_logger


def get_logger(module: str) -> logging.Logger:
    """Child of the package logger named after ``module`` (``slab_scatter.spectrum`` and so on)."""
    if module == ROOT_NAME or module.startswith(ROOT_NAME + "."):
        return logging.getLogger(module)
    return logging.getLogger(ROOT_NAME).getChild(module)


logger = setup_logger()
