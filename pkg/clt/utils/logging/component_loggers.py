import logging
import time
from functools import wraps
from typing import Any, Dict

from clt.utils.logging.logging_config import METRICS_LOGGER_NAME

TRAINING_FIELDS = ('run_id', 'fold', 'lambda_', 'epoch', 'stage', 'model_kind', 'direction', 'action')
DATA_FIELDS = ('path', 'line_number', 'action')


class ComponentLoggerAdapter(logging.LoggerAdapter):
    """Stamps every record with its component and any bound run context."""

    def __init__(self, logger, component: str, context: Dict[str, Any] = None):
        super().__init__(logger, {})
        self.component = component
        self.context = dict(context or {})

    def process(self, msg, kwargs):
        # Per-call extras override bound context
        kwargs['extra'] = {**self.context, 'component': self.component, **kwargs.get('extra', {})}
        return msg, kwargs

    def bind(self, **context) -> 'ComponentLoggerAdapter':
        """New adapter carrying `context` (run_id, fold, lambda_, ...) on top of the current one."""
        return ComponentLoggerAdapter(self.logger, self.component, {**self.context, **context})


def get_component_logger(component: str, module_name: str = None, **context) -> ComponentLoggerAdapter:
    """Logger named `module_name` (default `clt.<component>`) tagged with `component`."""
    return ComponentLoggerAdapter(logging.getLogger(module_name or f"clt.{component}"), component, context)


def _emit(logger, level: str, message: str, ordered_fields, context: Dict[str, Any]) -> None:
    # Known fields first so structured entries keep a stable key order
    extra = {k: context[k] for k in ordered_fields if k in context}
    extra.update((k, v) for k, v in context.items() if k not in extra)
    logger.log(logging.getLevelName(level.upper()), message, extra=extra)


def log_training_event(logger, message: str, level: str = "INFO", **context):
    """Training or protocol milestone; `context` usually carries run_id, fold, lambda_, epoch, stage, action."""
    _emit(logger, level, message, TRAINING_FIELDS, context)


def log_data_event(logger, message: str, level: str = "INFO", **context):
    """Corpus, vocabulary or embedding I/O (path, line_number, counts)."""
    _emit(logger, level, message, DATA_FIELDS, context)


def log_performance_event(logger, message: str, duration: float, level: str = "INFO", **context):
    """
    Timed event.

    Args:
        duration: wall time in seconds, recorded as duration_seconds and duration_ms
    """
    timing = {'duration_seconds': duration, 'duration_ms': round(duration * 1000, 2)}
    _emit(logger, level, message, (), {**timing, **context})


def log_epoch_metrics(**metrics):
    """Append one JSON object to the metrics stream (no-op unless a stream is attached)."""
    logging.getLogger(METRICS_LOGGER_NAME).info("epoch", extra={'metrics': metrics})


def log_function_calls(logger, component: str = None):
    """
    Decorator logging entry, completion (with duration) and failure of a subcommand or stage.

    Args:
        logger: component logger the records go to
        component: overrides the adapter's component on these records
    """
    def _extra(func_name: str, outcome: str, started: float = None, **fields) -> Dict[str, Any]:
        extra = {'action': f"{func_name}_{outcome}", **fields}
        if started is not None:
            elapsed = time.perf_counter() - started
            extra.update(duration_seconds=elapsed, duration_ms=round(elapsed * 1000, 2))
        if component:
            extra['component'] = component
        return extra

    def decorator(func):
        @wraps(func)
        def wrapper(*args, **kwargs):
            name = func.__name__
            started = time.perf_counter()
            logger.debug(f"{name} started", extra=_extra(name, "start"))
            try:
                result = func(*args, **kwargs)
            except Exception as e:
                extra = _extra(name, "error", started, error_type=type(e).__name__, error_message=str(e))
                logger.error(f"{name} failed after {extra['duration_seconds']:.3f}s: {e}", extra=extra)
                raise
            extra = _extra(name, "complete", started)
            logger.info(f"{name} finished in {extra['duration_seconds']:.3f}s", extra=extra)
            return result

        return wrapper
    return decorator


def get_numcore_logger(module_name: str = None, **context):
    return get_component_logger('numcore', module_name, **context)


def get_data_logger(module_name: str = None, **context):
    return get_component_logger('datasets', module_name, **context)


def get_model_logger(module_name: str = None, **context):
    return get_component_logger('models', module_name, **context)


def get_training_logger(module_name: str = None, **context):
    return get_component_logger('training', module_name, **context)


def get_evaluation_logger(module_name: str = None, **context):
    return get_component_logger('evaluation', module_name, **context)


def get_cli_logger(module_name: str = None, **context):
    return get_component_logger('cli', module_name, **context)
