from logging import NOTSET, DEBUG, INFO, WARNING, ERROR, CRITICAL
from ._logging import setup_logger, level_from_name
