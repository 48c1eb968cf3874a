# logger.py
from loguru import logger
import contextlib
import sys
import os

LOG_FORMAT = (
    "<green>{time:YYYY-MM-DD HH:mm:ss}</green> | "
    "<level>{level}</level> | {extra[service]} | "
    "<cyan>{name}</cyan>:<cyan>{function}</cyan>:<cyan>{line}</cyan> - <level>{message}</level>"
)

_sink_id = None

def set_log_level(level: str = None):
    """(Re)install the stderr sink at level; loggers bound by init_logger keep their names."""
    global _sink_id
    level = level or os.getenv("ISING2MM_LOG_LEVEL", "WARNING")
    if _sink_id is None:
        logger.remove()
    else:
        with contextlib.suppress(ValueError):
            logger.remove(_sink_id)
    # stdout carries command output, so log records go to stderr
    _sink_id = logger.add(sys.stderr, format=LOG_FORMAT, level=level.upper(), enqueue=True)

def init_logger(service_name: str, level: str = None):
    logger.configure(extra={"service": "Ising2mm"})
    set_log_level(level)
    return logger.bind(service=service_name)
