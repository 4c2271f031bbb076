from ._config import RunConfig
from ._main import build_parser, main
