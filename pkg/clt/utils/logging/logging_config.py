import logging
import logging.handlers
import json
import os
from datetime import datetime, timezone
from pathlib import Path

from clt.config import ENV_PREFIX

# Record attributes copied into structured entries when present
CONTEXT_FIELDS = (
    'component', 'action', 'run_id', 'fold', 'lambda_', 'epoch', 'stage',
    'model_kind', 'direction', 'parameter', 'path', 'line_number', 'duration_ms',
)
# Subset echoed on console lines
CONSOLE_CONTEXT = ('fold', 'lambda_', 'epoch', 'stage')

METRICS_LOGGER_NAME = 'clt.metrics'

LEVEL_COLOURS = {
    'DEBUG': '\033[36m',
    'INFO': '\033[32m',
    'WARNING': '\033[33m',
    'ERROR': '\033[31m',
    'CRITICAL': '\033[35m',
}
RESET = '\033[0m'

# Metrics records only ever go to an attached stream
logging.getLogger(METRICS_LOGGER_NAME).propagate = False
logging.getLogger(METRICS_LOGGER_NAME).addHandler(logging.NullHandler())


class StructuredFormatter(logging.Formatter):
    """One JSON object per record: UTC timestamp, level, origin and any run context."""

    def format(self, record):
        entry = {
            'timestamp': datetime.fromtimestamp(record.created, tz=timezone.utc).isoformat(),
            'level': record.levelname,
            'logger': record.name,
            'message': record.getMessage(),
            'source': f"{record.module}:{record.funcName}:{record.lineno}",
        }
        entry.update({f: getattr(record, f) for f in CONTEXT_FIELDS if hasattr(record, f)})
        if record.exc_info:
            entry['exception'] = self.formatException(record.exc_info)
        return json.dumps(entry, default=str)


class MetricsFormatter(logging.Formatter):
    """Emits only the `metrics` payload of a record as one JSON object per line."""

    def format(self, record):
        payload = dict(getattr(record, 'metrics', {}))
        payload.setdefault('event', record.getMessage())
        return json.dumps(payload, sort_keys=True, default=str)


class ConsoleFormatter(logging.Formatter):
    """`HH:MM:SS LEVEL [component:action] message (fold=.. epoch=..)`"""

    def format(self, record):
        clock = datetime.fromtimestamp(record.created).strftime('%H:%M:%S')
        level = f"{LEVEL_COLOURS.get(record.levelname, '')}{record.levelname:8}{RESET}"
        tag = getattr(record, 'component', 'clt')
        if getattr(record, 'action', ''):
            tag += f":{record.action}"
        line = f"{clock} {level} {'[' + tag + ']':20} {record.getMessage()}"
        context = " ".join(f"{f}={getattr(record, f)}" for f in CONSOLE_CONTEXT if getattr(record, f, None) is not None)
        return f"{line} ({context})" if context else line


def setup_logging(
    log_level: str = "INFO",
    console_output: bool = True,
    file_output: bool = True,
    log_dir: str = "logs",
    log_filename: str = "clt.log",
    max_file_size_mb: int = 10,
    backup_count: int = 5
):
    """
    Install console and rotating-file handlers on the root logger, replacing any present.

    The console never shows DEBUG; the file gets everything at `log_level` and above.
    """
    level = logging.getLevelName(log_level.upper())
    root = logging.getLogger()
    root.setLevel(level)
    for handler in list(root.handlers):
        root.removeHandler(handler)

    handlers = []
    if console_output:
        console = logging.StreamHandler()
        console.setFormatter(ConsoleFormatter())
        console.setLevel(max(logging.INFO, level))
        handlers.append(console)
    if file_output:
        Path(log_dir).mkdir(parents=True, exist_ok=True)
        rotating = logging.handlers.RotatingFileHandler(
            Path(log_dir) / log_filename,
            maxBytes=max_file_size_mb * 1024 * 1024,
            backupCount=backup_count,
            encoding='utf-8',
        )
        rotating.setFormatter(StructuredFormatter())
        rotating.setLevel(level)
        handlers.append(rotating)

    for handler in handlers:
        root.addHandler(handler)
    return root


def attach_metrics_stream(path: str) -> logging.Handler:
    """
    Route the per-epoch metrics logger to an append-only JSON-lines file.

    Args:
        path: Metrics file; parent directories are created

    Returns:
        The attached handler, so callers can detach it when a run finishes
    """
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    handler = logging.FileHandler(path, mode='a', encoding='utf-8')
    handler.setFormatter(MetricsFormatter())
    handler.setLevel(logging.INFO)

    metrics_logger = logging.getLogger(METRICS_LOGGER_NAME)
    metrics_logger.setLevel(logging.INFO)
    metrics_logger.propagate = False
    metrics_logger.addHandler(handler)
    return handler


def detach_metrics_stream(handler: logging.Handler) -> None:
    metrics_logger = logging.getLogger(METRICS_LOGGER_NAME)
    metrics_logger.removeHandler(handler)
    handler.close()


def _env_flag(name: str, default: str = 'true') -> bool:
    return os.getenv(f'{ENV_PREFIX}{name}', default).strip().lower() in ('1', 'true', 'yes', 'on')


def setup_logging_from_env(log_dir: str = None):
    """`setup_logging` driven by CLT_LOG_LEVEL, CLT_LOG_CONSOLE, CLT_LOG_FILE and CLT_LOG_DIR; `log_dir` wins over the env."""
    return setup_logging(
        log_level=os.getenv(f'{ENV_PREFIX}LOG_LEVEL', 'INFO'),
        console_output=_env_flag('LOG_CONSOLE'),
        file_output=_env_flag('LOG_FILE'),
        log_dir=log_dir or os.getenv(f'{ENV_PREFIX}LOG_DIR', 'logs'),
    )
