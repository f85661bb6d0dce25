"""Command interface and registry."""
import argparse
from abc import ABC, abstractmethod
from typing import Any, Dict, List, Optional

from core.context import CommandContext


class Command(ABC):
    """Base class for CLI commands.

    A command is a pure function of its input document and flags: ``run``
    returns a JSON-ready object and raises a DonaldsonError on failure.
    """

    #: "required", "optional" or "none": whether a document is read from a
    #: file, stdin or --fixture.
    input_mode: str = "required"

    @property
    @abstractmethod
    def name(self) -> str:
        """Subcommand name."""

    @property
    @abstractmethod
    def help(self) -> str:
        """One-line description for --help."""

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        """Register command-specific flags."""

    @abstractmethod
    def run(self, context: CommandContext) -> Any:
        """Execute the command.

        Args:
            context: Input document, parsed flags and config

        Returns:
            JSON-serializable output
        """

    def exit_code(self, output: Any) -> int:
        """Exit code for a successful run; report commands may signal failure."""
        return 0


class CommandRegistry:
    """Registry for CLI commands."""

    def __init__(self):
        self._commands: Dict[str, Command] = {}

    def register(self, command: Command) -> None:
        if command.name in self._commands:
            raise ValueError(f"Command already registered: {command.name}")
        self._commands[command.name] = command

    def get(self, name: str) -> Optional[Command]:
        return self._commands.get(name)

    def list_commands(self) -> List[str]:
        return list(self._commands.keys())


def default_registry() -> CommandRegistry:
    """Registry holding every built-in command, in --help order."""
    from commands.analysis import ANALYSIS_COMMANDS
    from commands.series_commands import SERIES_COMMANDS
    from commands.transform_commands import TRANSFORM_COMMANDS

    registry = CommandRegistry()
    for cls in (*SERIES_COMMANDS, *TRANSFORM_COMMANDS, *ANALYSIS_COMMANDS):
        registry.register(cls())
    return registry
