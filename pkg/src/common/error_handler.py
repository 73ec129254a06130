"""Error records and experiment logging for lacunaria.

Errors raised inside a subcommand are logged as one JSON record on the
`errors` logger; each subcommand run leaves one JSON record on the
`experiments` logger with its config, duration and verdict. Setting
LACUNARIA_LOG_DIR additionally persists both streams to files.
"""

import logging
import traceback
import json
import os
import time
from datetime import datetime
from typing import Optional, Dict, Any
from functools import wraps

from src.common.errors import LacunariaError

LOG_DIR_ENV_VAR = 'LACUNARIA_LOG_DIR'
LOG_FILES = {'errors': ('errors.log', logging.ERROR), 'experiments': ('experiments.log', logging.INFO)}
ARG_PREVIEW = 200


def _summarize_args(args, kwargs) -> Dict[str, Any]:
    """Config echo when the first argument carries one, else a truncated repr."""
    if args and hasattr(args[0], 'to_dict'):
        return {'config': args[0].to_dict()}
    return {'args': str(args)[:ARG_PREVIEW], 'kwargs': str(kwargs)[:ARG_PREVIEW]}


class ErrorLogger:
    """Structured error and experiment records, optionally mirrored to disk."""

    def __init__(self, log_dir: Optional[str] = None):
        self.log_dir = log_dir
        if self.log_dir:
            os.makedirs(self.log_dir, exist_ok=True)
            for name, (filename, level) in LOG_FILES.items():
                self._attach_file(name, filename, level)

    def _attach_file(self, logger_name: str, filename: str, level: int):
        path = os.path.abspath(os.path.join(self.log_dir, filename))
        target = logging.getLogger(logger_name)
        if any(getattr(h, 'baseFilename', None) == path for h in target.handlers):
            return
        handler = logging.FileHandler(path)
        handler.setLevel(level)
        handler.setFormatter(logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s'))
        target.addHandler(handler)
        target.setLevel(min(target.level or level, level))

    def log_error(self, error: Exception, context: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
        """Log an error record and return it.

        Library errors (LacunariaError) are expected outcomes of bad input or
        exhausted budgets and are logged without a traceback.
        """
        expected = isinstance(error, LacunariaError)
        error_details = {
            'timestamp': datetime.now().isoformat(),
            'error_type': type(error).__name__,
            'error_message': str(error),
            'category': 'input' if expected else 'unexpected',
            'traceback': None if expected else traceback.format_exc(),
            'context': context or {}
        }
        logging.getLogger('errors').error(f"{error_details['error_type']}: "
                                          f"{json.dumps(error_details, default=str, sort_keys=True)}")
        return error_details

    def log_experiment(self, operation: str, details: Dict[str, Any],
                       success: bool = True, error: Optional[str] = None,
                       elapsed: Optional[float] = None, passed: Optional[bool] = None):
        """Log one subcommand run; `passed` is the mathematical verdict when known."""
        log_entry = {
            'timestamp': datetime.now().isoformat(),
            'operation': operation,
            'success': success,
            'passed': passed,
            'elapsed_s': None if elapsed is None else round(elapsed, 6),
            'details': details,
            'error': error
        }
        experiment_logger = logging.getLogger('experiments')
        if success:
            experiment_logger.info(f"Experiment: {json.dumps(log_entry, default=str)}")
        else:
            experiment_logger.error(f"Experiment failed: {json.dumps(log_entry, default=str)}")


_error_logger: Optional[ErrorLogger] = None


def get_error_logger() -> ErrorLogger:
    """Process-wide ErrorLogger, created on first use from LACUNARIA_LOG_DIR."""
    global _error_logger
    if _error_logger is None:
        _error_logger = ErrorLogger(os.environ.get(LOG_DIR_ENV_VAR))
    return _error_logger


def handle_errors(operation_name: str = None):
    """Log any exception raised by the wrapped subcommand, then re-raise it."""
    def decorator(f):
        @wraps(f)
        def wrapped(*args, **kwargs):
            try:
                return f(*args, **kwargs)
            except Exception as e:
                context = {'operation': operation_name or f.__name__, **_summarize_args(args, kwargs)}
                get_error_logger().log_error(e, context)
                raise
        return wrapped
    return decorator


def log_experiment(experiment: str):
    """Record duration and verdict of a subcommand run on the experiments logger."""
    def decorator(f):
        @wraps(f)
        def wrapped(*args, **kwargs):
            details = {'function': f.__name__, **_summarize_args(args, kwargs)}
            logging.getLogger('experiments').debug(f"Starting experiment {experiment}")
            start = time.perf_counter()
            try:
                result = f(*args, **kwargs)
            except Exception as e:
                get_error_logger().log_experiment(experiment, details, success=False, error=str(e),
                                                  elapsed=time.perf_counter() - start)
                raise
            get_error_logger().log_experiment(experiment, details, success=True,
                                              elapsed=time.perf_counter() - start,
                                              passed=getattr(result, 'passed', None))
            return result
        return wrapped
    return decorator
