"""Logging and small shared helpers."""
from typing import Optional

import logging
import os
import sys

_FORMAT = "%(asctime)s [%(levelname)s] %(name)s: %(message)s"


def get_logger(name: str,
               log_level: Optional[int] = None,
               log_file_name: Optional[str] = None,
               log_to_console: bool = True) -> logging.Logger:
    """
    Return the logger, capable to log into file and/or to console.

    Handlers are attached only the first time a name is requested, so module
    level loggers can be created freely.

    :param name: the name of the logger.
    :param log_level: The logging verbosity level, EVPOS_LOG_LEVEL when omitted.
    :param log_file_name: The file to be used to write logs, EVPOS_LOG_FILE when omitted.
    :param log_to_console: Boolean showing if we want to log into the console.
    :returns: The logger object.
    """
    logger = logging.getLogger(name)
    if log_level is None:
        log_level = logging.getLevelName(os.getenv("EVPOS_LOG_LEVEL", "INFO").upper())
        if not isinstance(log_level, int):
            log_level = logging.INFO
    logger.setLevel(log_level)
    if logger.handlers:
        return logger

    if log_to_console:
        # Configure the stream handler (stdout)
        stream_handler = logging.StreamHandler(sys.stdout)
        stream_handler.setLevel(log_level)
        stream_handler.setFormatter(logging.Formatter(_FORMAT))
        logger.addHandler(stream_handler)

    log_file_name = log_file_name or os.getenv("EVPOS_LOG_FILE")
    if log_file_name:
        file_handler = logging.FileHandler(log_file_name)
        file_handler.setLevel(log_level)
        file_handler.setFormatter(logging.Formatter(_FORMAT))
        logger.addHandler(file_handler)
    logger.propagate = False
    return logger
