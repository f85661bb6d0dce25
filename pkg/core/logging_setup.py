"""structlog configuration; everything goes to stderr so stdout stays pure JSON."""
import logging
import sys
from typing import Optional, TextIO

import structlog


def _stream_factory(stream: Optional[TextIO]):
    """PrintLogger factory writing to ``stream``, or to whatever sys.stderr is at log time."""

    def factory(*args) -> structlog.PrintLogger:
        return structlog.PrintLogger(stream if stream is not None else sys.stderr)

    return factory


def configure_logging(level: str = "warning", fmt: str = "console", stream: Optional[TextIO] = None) -> None:
    """Configure structlog once per process.

    Args:
        level: Minimum level name ("debug", "info", "warning", "error")
        fmt: "console" for human-readable lines, "json" for one object per line
        stream: Output stream (defaults to stderr)
    """
    numeric = logging.getLevelName(level.upper())
    if not isinstance(numeric, int):
        raise ValueError(f"unknown log level: {level}")

    if fmt == "json":
        renderer = structlog.processors.JSONRenderer(sort_keys=True)
    elif fmt == "console":
        renderer = structlog.dev.ConsoleRenderer(colors=False)
    else:
        raise ValueError(f"unknown log format: {fmt}")

    structlog.configure(
        processors=[
            structlog.contextvars.merge_contextvars,
            structlog.processors.add_log_level,
            structlog.processors.TimeStamper(fmt="iso", utc=True),
            renderer,
        ],
        wrapper_class=structlog.make_filtering_bound_logger(numeric),
        logger_factory=_stream_factory(stream),
        cache_logger_on_first_use=False,
    )
