"""Context and result objects passed between the orchestrator and commands."""
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

from core.events import EventDispatcher


@dataclass
class CommandContext:
    """Everything a command may read: its input document, flags and config."""

    command: str
    options: Dict[str, Any]
    config: Dict[str, Any]
    document: Optional[Any] = None
    input_name: Optional[str] = None
    dispatcher: EventDispatcher = field(default_factory=EventDispatcher)
    catalog: Optional[Any] = None

    def option(self, name: str, config_key: Optional[str] = None, default: Any = None) -> Any:
        """Flag value, falling back to a dot-notation config key, then ``default``."""
        value = self.options.get(name)
        if value is not None:
            return value
        if config_key is not None:
            node: Any = self.config
            for k in config_key.split("."):
                if not isinstance(node, dict) or k not in node:
                    return default
                node = node[k]
            return node
        return default


@dataclass
class CommandResult:
    """Outcome of a single command."""

    command: str
    success: bool
    output: Optional[Any] = None
    error: Optional[Dict[str, Any]] = None
    exit_code: int = 0
    metadata: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "command": self.command,
            "success": self.success,
            "output": self.output,
            "error": self.error,
            "exit_code": self.exit_code,
            "metadata": self.metadata,
        }
