import coloredlogs

from utils.config import LOG_LEVEL

LOG_FORMAT = "%(asctime)s %(name)s [%(levelname)s] %(message)s"


def setup_logging(level: str | None = None):
    """Install coloured console logging once for the whole lab"""
    coloredlogs.install(level=(level or LOG_LEVEL).upper(), fmt=LOG_FORMAT)
