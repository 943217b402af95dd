import logging
import sys
from typing import Callable, Optional

APP_LOGGER_NAME = 'fl_simulator'

_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def setup_logging(level: str = "INFO", log_file: Optional[str] = None) -> logging.Logger:
    """
    Set up logging configuration for the application.

    Handlers go on the root logger so module loggers created with
    logging.getLogger(__name__) are captured too. Console output goes to
    stderr; stdout carries round logs.
    """
    numeric_level = getattr(logging, level.upper())
    root = logging.getLogger()
    root.setLevel(numeric_level)

    logger = logging.getLogger(APP_LOGGER_NAME)
    logger.setLevel(numeric_level)

    # Prevent adding multiple handlers on repeated CLI invocations in one process
    if getattr(root, '_flsim_configured', False):
        for handler in root.handlers:
            handler.setLevel(numeric_level)
        return logger

    formatter = logging.Formatter(_FORMAT, datefmt='%Y-%m-%d %H:%M:%S')

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(numeric_level)
    console_handler.setFormatter(formatter)
    root.addHandler(console_handler)

    if log_file:
        file_handler = logging.FileHandler(log_file)
        file_handler.setLevel(numeric_level)
        file_handler.setFormatter(formatter)
        root.addHandler(file_handler)

    root._flsim_configured = True
    return logger


def log_progress(current: int, total: int, message: str = "", logger: logging.Logger = None):
    """
    Log progress in a consistent format
    """
    if logger is None:
        logger = logging.getLogger(APP_LOGGER_NAME)

    percentage = (current / total) * 100 if total > 0 else 0
    logger.info(f"Progress: {current}/{total} ({percentage:.1f}%) - {message}")


def create_progress_callback(logger: logging.Logger = None) -> Callable[[int, int, str], None]:
    """
    Create a progress callback function that logs progress
    """
    if logger is None:
        logger = logging.getLogger(APP_LOGGER_NAME)

    def progress_callback(current: int, total: int, message: str = ""):
        log_progress(current, total, message, logger)

    return progress_callback
