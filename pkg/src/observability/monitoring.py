"""
Observability: structured logging for analysis runs.
Log records go to a timestamped file and to stderr, leaving stdout to reports.
"""

import logging
import sys
from datetime import datetime
from pathlib import Path
from typing import Any, List, Optional

import structlog

_HANDLER_TAG = "_e2pa_handler"


def configure_logging(
    log_level: str = "INFO", log_format: str = "console", log_dir: Optional[str] = "logs"
) -> Optional[str]:
    """
    Configure structured logging with structlog.

    Args:
        log_level: Logging level (DEBUG, INFO, WARNING, ERROR)
        log_format: Format type ("json" or "console")
        log_dir: Directory to store log files; None disables the file handler

    Returns:
        Path of the log file, or None without a file handler
    """
    level = getattr(logging, log_level.upper(), None)
    if not isinstance(level, int):
        raise ValueError(f"unknown log level {log_level!r}")

    processors: List[Any] = [
        structlog.stdlib.filter_by_level,
        structlog.stdlib.add_logger_name,
        structlog.stdlib.add_log_level,
        structlog.stdlib.PositionalArgumentsFormatter(),
        structlog.processors.TimeStamper(fmt="iso"),
        structlog.processors.StackInfoRenderer(),
        structlog.processors.format_exc_info,
        structlog.processors.UnicodeDecoder(),
    ]

    if log_format == "json":
        processors.append(structlog.processors.JSONRenderer())
    else:
        processors.append(structlog.dev.ConsoleRenderer(colors=False))

    structlog.configure(
        processors=processors,
        context_class=dict,
        logger_factory=structlog.stdlib.LoggerFactory(),
        wrapper_class=structlog.stdlib.BoundLogger,
        cache_logger_on_first_use=True,
    )

    root_logger = logging.getLogger()
    for handler in list(root_logger.handlers):
        if getattr(handler, _HANDLER_TAG, False):
            root_logger.removeHandler(handler)
            handler.close()

    handlers: List[logging.Handler] = []
    log_file = None
    if log_dir:
        log_path = Path(log_dir)
        log_path.mkdir(parents=True, exist_ok=True)
        timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
        log_file = log_path / f"e2pa_{timestamp}.log"
        handlers.append(logging.FileHandler(log_file))
    handlers.append(logging.StreamHandler(sys.stderr))

    for handler in handlers:
        handler.setLevel(level)
        handler.setFormatter(logging.Formatter("%(message)s"))
        setattr(handler, _HANDLER_TAG, True)
        root_logger.addHandler(handler)
    root_logger.setLevel(level)

    return str(log_file) if log_file else None


class ObservabilityManager:
    """
    Manages logging for CLI commands.
    """

    def __init__(
        self, log_level: str = "INFO", log_format: str = "console", log_dir: Optional[str] = "logs"
    ):
        """
        Initialize observability manager.

        Args:
            log_level: Logging level for the application
            log_format: "json" or "console"
            log_dir: Directory to store log files
        """
        self.log_file = configure_logging(
            log_level=log_level, log_format=log_format, log_dir=log_dir
        )
        self.logger = structlog.get_logger("observability_manager")
        self.logger.debug(
            "observability_manager.initialized", log_level=log_level, log_file=self.log_file
        )

    def get_log_file(self) -> Optional[str]:
        """Get the current log file path."""
        return self.log_file

    def log_command_start(self, command: str, **kwargs: Any) -> None:
        self.logger.info("command.start", command=command, **kwargs)

    def log_command_complete(self, command: str, duration: float, **kwargs: Any) -> None:
        self.logger.info("command.complete", command=command, duration_seconds=duration, **kwargs)

    def log_command_error(self, command: str, error: str, **kwargs: Any) -> None:
        self.logger.error("command.error", command=command, error=error, **kwargs)
