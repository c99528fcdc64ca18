import logging
import sys
from datetime import datetime
from pathlib import Path

LOG_FORMAT = "%(asctime)s | %(levelname)8s | %(funcName)s:%(lineno)d | %(message)s"


def setup_logging(name: str = "clockinterf", log_level: str = "INFO", log_dir: Path | None = None) -> logging.Logger:
    """
    Configure the toolkit logger.
    Console output goes to stderr so stdout stays free for CLI summaries;
    a timestamped DEBUG log file is added when log_dir is given.
    """
    logger = logging.getLogger(name)
    logger.setLevel(getattr(logging, log_level.upper(), logging.INFO))
    logger.handlers.clear()

    fmt = logging.Formatter(LOG_FORMAT, datefmt="%Y-%m-%d %H:%M:%S")

    if log_dir is not None:
        log_dir = Path(log_dir)
        log_dir.mkdir(parents=True, exist_ok=True)
        fh = logging.FileHandler(log_dir / f"{name}_{datetime.now().strftime('%Y%m%d_%H%M%S')}.log")
        fh.setLevel(logging.DEBUG)
        fh.setFormatter(fmt)
        logger.addHandler(fh)

    ch = logging.StreamHandler(sys.stderr)
    ch.setLevel(getattr(logging, log_level.upper(), logging.INFO))
    ch.setFormatter(fmt)
    logger.addHandler(ch)

    # library modules log under "src.*"; route them through the same handlers
    lib = logging.getLogger("src")
    lib.setLevel(logger.level)
    lib.handlers = list(logger.handlers)
    lib.propagate = False
    return logger
