"""Orchestrator: resolves input, runs one command and maps errors to exit codes."""
import os
import sys
import time
from pathlib import Path
from typing import Any, Dict, Optional, TextIO

import structlog

from algebra.truncated import configure_parallelism
from commands import CommandRegistry, default_registry
from commands.catalog import FixtureCatalog
from commands.documents import encode_series, loads
from core.config_loader import ConfigLoader
from core.context import CommandContext, CommandResult
from core.errors import DocumentError, DonaldsonError
from core.events import Event, EventDispatcher, EventType

logger = structlog.get_logger(__name__)

THREADS_ENV = "DONALDSON_THREADS"


def resolve_threads(config_loader: ConfigLoader, override: Optional[int] = None) -> int:
    """CLI flag, then DONALDSON_THREADS, then parallel.threads."""
    if override is not None:
        threads = override
    elif os.getenv(THREADS_ENV):
        try:
            threads = int(os.environ[THREADS_ENV])
        except ValueError:
            raise DocumentError(f"{THREADS_ENV} must be an integer, got {os.environ[THREADS_ENV]!r}") from None
    else:
        threads = int(config_loader.get("parallel.threads", 1))
    return max(1, threads)


class Orchestrator:
    """Runs commands against documents from files, stdin or the catalog."""

    def __init__(self, config_loader: ConfigLoader, registry: Optional[CommandRegistry] = None, threads: int = 1):
        """Initialize orchestrator.

        Args:
            config_loader: Configuration loader
            registry: Commands to dispatch to (defaults to all built-ins)
            threads: Worker threads for expansion and multiplication
        """
        self.config_loader = config_loader
        self.registry = registry or default_registry()
        self.event_dispatcher = EventDispatcher()
        self.event_dispatcher.subscribe_all(self._log_event)
        self.catalog = FixtureCatalog(config_loader, self.event_dispatcher)
        configure_parallelism(threads)

    @staticmethod
    def _log_event(event: Event) -> None:
        logger.debug(event.type.value, source=event.source, **event.payload)

    def load_document(
        self,
        input_path: Optional[Path] = None,
        fixture: Optional[str] = None,
        stdin: Optional[TextIO] = None,
    ) -> Any:
        """Read the input document.

        Raises:
            DocumentError: Both or neither of path/fixture given where one is
                needed, unreadable files, invalid JSON
        """
        if fixture is not None:
            if input_path is not None:
                raise DocumentError("give either an input file or --fixture, not both")
            return encode_series(self.catalog.get(fixture))
        if input_path is None or str(input_path) == "-":
            return loads((stdin or sys.stdin).read())
        try:
            return loads(Path(input_path).read_text())
        except OSError as e:
            raise DocumentError(f"cannot read {input_path}: {e.strerror}") from e

    def execute(
        self,
        command_name: str,
        options: Dict[str, Any],
        input_path: Optional[Path] = None,
        fixture: Optional[str] = None,
        stdin: Optional[TextIO] = None,
    ) -> CommandResult:
        """Run a command and capture its outcome.

        Args:
            command_name: Registered command name
            options: Parsed command flags
            input_path: Document path ("-" or None reads stdin)
            fixture: Catalog fixture to use as input instead
            stdin: Stream standing in for sys.stdin

        Returns:
            CommandResult whose exit_code is 0, 2 (validation) or 3 (inconsistency)
        """
        command = self.registry.get(command_name)
        if command is None:
            error = DocumentError(f"unknown command {command_name!r}", {"available": self.registry.list_commands()})
            return CommandResult(command_name, False, error=error.to_dict(), exit_code=error.exit_code)

        started = time.monotonic()
        self.event_dispatcher.emit(EventType.COMMAND_STARTED, source=command_name, fixture=fixture)
        try:
            document = None
            if command.input_mode == "required" or (
                command.input_mode == "optional" and (input_path is not None or fixture is not None)
            ):
                document = self.load_document(input_path, fixture, stdin)
            elif command.input_mode == "none" and (input_path is not None or fixture is not None):
                raise DocumentError(f"{command_name} takes no input document")

            context = CommandContext(
                command=command_name,
                options=options,
                config=self.config_loader.config,
                document=document,
                input_name=fixture or (str(input_path) if input_path else "-"),
                dispatcher=self.event_dispatcher,
                catalog=self.catalog,
            )
            output = command.run(context)
        except DonaldsonError as e:
            self.event_dispatcher.emit(EventType.COMMAND_FAILED, source=command_name, error=e.to_dict())
            logger.info("command_failed", command=command_name, error=e.message, kind=e.kind)
            return CommandResult(command_name, False, error=e.to_dict(), exit_code=e.exit_code)

        exit_code = command.exit_code(output)
        elapsed_ms = round((time.monotonic() - started) * 1000, 1)
        self.event_dispatcher.emit(
            EventType.COMMAND_COMPLETED, source=command_name, exit_code=exit_code, duration_ms=elapsed_ms
        )
        logger.info("command_completed", command=command_name, exit_code=exit_code, duration_ms=elapsed_ms)
        return CommandResult(
            command_name,
            exit_code == 0,
            output=output,
            exit_code=exit_code,
            metadata={"duration_ms": elapsed_ms},
        )
