import datetime
import logging
from pathlib import Path

LOG_DIR = Path("logs")
LOG_LEVELS = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]

MAIN_FORMAT = "%(asctime)s - %(filename)s:%(lineno)d - %(funcName)s - %(levelname)s - %(message)s"
WORKER_FORMAT = "%(asctime)s - [Worker-%(process)d] - %(filename)s:%(lineno)d - %(funcName)s - %(levelname)s - %(message)s"


def get_formatter(is_worker):
    return logging.Formatter(WORKER_FORMAT if is_worker else MAIN_FORMAT)


def resolve_log_level(name) -> int:
    if isinstance(name, int):
        return name
    level = str(name).upper()
    if level not in LOG_LEVELS:
        raise ValueError(f"Invalid log level: {name}")
    return getattr(logging, level)


def setup_logging(log_level, log_file=None, is_worker=False, quiet=False):
    """
    Route the root logger to the console and a log file. `quiet` keeps the console at
    WARNING while the file still receives `log_level`. Hop-batch pool workers call this
    through the pool initializer with is_worker=True and the parent's log file.
    """
    formatter = get_formatter(is_worker)

    root_logger = logging.getLogger()
    for handler in root_logger.handlers[:]:
        root_logger.removeHandler(handler)
    root_logger.setLevel(resolve_log_level(log_level))

    console_handler = logging.StreamHandler()
    console_handler.setFormatter(formatter)
    if quiet:
        console_handler.setLevel(logging.WARNING)
    root_logger.addHandler(console_handler)

    if not log_file:
        log_file = generate_unique_log_path("asteroid_gnc")
    Path(log_file).parent.mkdir(parents=True, exist_ok=True)

    file_handler = logging.FileHandler(log_file, encoding="utf-8")
    file_handler.setFormatter(formatter)
    root_logger.addHandler(file_handler)
    return Path(log_file)


def generate_unique_log_path(prefix: str) -> Path:
    """Timestamped log path under logs/, kept apart from run outputs."""
    timestamp = datetime.datetime.now().strftime("%Y-%m-%d_%H-%M-%S")
    LOG_DIR.mkdir(parents=True, exist_ok=True)
    return LOG_DIR / f"{prefix}_{timestamp}.log"
