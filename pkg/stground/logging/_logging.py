import os
import logging
from logging.handlers import RotatingFileHandler


MAX_FILE_SIZE = 10*int(2**20)  # 10MiB
LOG_FORMAT = u"[%(asctime)s.%(msecs)03d] %(levelname)s [%(name)s.%(funcName)s:%(lineno)d] %(message)s"


def setup_logger(level=logging.WARNING, file_name=None, log_dir=None, log_to_console=True):
    """
    Configures the root logger used across the package.

    A rotating file handler is only added when `file_name` is given;
    it is created under `log_dir` (default `logs/`).
    """

    handlers = []
    if file_name:
        log_dir = log_dir or 'logs'
        os.makedirs(log_dir, exist_ok=True)
        handlers.append(RotatingFileHandler(
            os.path.join(log_dir, file_name), maxBytes=MAX_FILE_SIZE,
            backupCount=10, encoding='utf8'
        ))
    if log_to_console:
        handlers.append(logging.StreamHandler())
    logging.basicConfig(
        handlers=handlers,
        level=level,
        format=LOG_FORMAT,
        datefmt='%Y-%m-%dT%H:%M:%S',
        force=True,
    )


def level_from_name(name, default=logging.WARNING):
    if not name:
        return default
    level = logging.getLevelName(str(name).upper())
    return level if isinstance(level, int) else default
