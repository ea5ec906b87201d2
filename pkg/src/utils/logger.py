"""
Logging for delayfb.

Records go to stderr through tqdm.write, so they never tear a sweep's
progress bar and never mix with JSON or CSV printed on stdout. A dated
file under DELAYFB_LOG_DIR is added when DELAYFB_LOG_TO_FILE is set.
"""

import logging
import os
import sys
from datetime import datetime
from pathlib import Path
from typing import Union

from tqdm import tqdm

from config import config

_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
_DATE_FORMAT = "%Y-%m-%d %H:%M:%S"


class TqdmStderrHandler(logging.Handler):
    """Emit formatted records above any active tqdm bar."""

    def emit(self, record: logging.LogRecord) -> None:
        try:
            tqdm.write(self.format(record), file=sys.stderr)
        except Exception:
            self.handleError(record)


def _resolve_level(level: Union[int, str]) -> int:
    if isinstance(level, int):
        return level
    return getattr(logging, level.upper(), logging.INFO)


def setup_logger(
    name: str = "delayfb",
    level: Union[int, str] = logging.INFO,
    log_dir: str = "./logs",
    log_to_file: bool = False,
) -> logging.Logger:
    """
    Configure the named logger once; later calls return it unchanged.

    Args:
        name: Logger name
        level: Level number or name ("DEBUG", "INFO", ...)
        log_dir: Directory of delayfb_YYYYMMDD.log
        log_to_file: Also append to the dated file

    Returns:
        Configured logger instance
    """
    logger = logging.getLogger(name)
    if logger.handlers:
        return logger

    level = _resolve_level(level)
    logger.setLevel(level)
    logger.propagate = False
    formatter = logging.Formatter(fmt=_FORMAT, datefmt=_DATE_FORMAT)

    console = TqdmStderrHandler(level)
    console.setFormatter(formatter)
    logger.addHandler(console)

    if log_to_file:
        Path(log_dir).mkdir(parents=True, exist_ok=True)
        stamp = datetime.now().strftime("%Y%m%d")
        file_handler = logging.FileHandler(os.path.join(log_dir, f"delayfb_{stamp}.log"), encoding="utf-8")
        file_handler.setLevel(level)
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)

    return logger


logger = setup_logger(level=config.log_level, log_dir=config.log_dir, log_to_file=config.log_to_file)
