"""CLI for computing with structured Donaldson series."""
import argparse
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

from dotenv import load_dotenv

from commands import default_registry
from commands.documents import dumps
from core.config_loader import ConfigLoader
from core.errors import DonaldsonError
from core.logging_setup import configure_logging
from core.orchestrator import Orchestrator, resolve_threads

# Load environment variables from .env file
load_dotenv()


def build_parser() -> argparse.ArgumentParser:
    """Top-level parser with one subparser per registered command."""
    parser = argparse.ArgumentParser(
        description="Symbolic Donaldson series: expansion, transforms, Floer annihilators and structure fitting",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # List the built-in fixtures
  python run_donaldson.py catalog

  # Basic classes of a fixture
  python run_donaldson.py basic-classes --fixture two-class

  # Blow up, then read the classes back (stdin pipeline)
  python run_donaldson.py blowup --fixture two-class --variant cosh | \\
      python run_donaldson.py basic-classes

  # Expand to a truncated series and fit the structure back
  python run_donaldson.py expand --fixture two-class --cutoff 8 --lambda-cutoff 1 | \\
      python run_donaldson.py fit --bound 1

  # Annihilators for genus 3, nilpotency order 2
  python run_donaldson.py annihilators --genus 3 --mult 2 --dsigma 1

  # Coordinates starting with a minus sign need "=": --w=-1,0

Exit codes: 0 success, 2 validation error, 3 mathematical inconsistency.
        """,
    )
    parser.add_argument("--config", type=Path, help="Path to config file (default: config/donaldson.yaml)")
    parser.add_argument("--threads", type=int, help="Worker threads (overrides DONALDSON_THREADS and config)")
    parser.add_argument("--log-level", help="Log level (overrides logging.level)")
    parser.add_argument("--log-format", choices=["console", "json"], help="Log format (overrides logging.format)")
    parser.add_argument("--indent", type=int, help="JSON indent; 0 prints one line (overrides output.indent)")

    subparsers = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    registry = default_registry()
    for name in registry.list_commands():
        command = registry.get(name)
        sub = subparsers.add_parser(name, help=command.help, description=command.help)
        if command.input_mode != "none":
            sub.add_argument("input", nargs="?", type=Path, help="Input JSON document (default: stdin)")
            sub.add_argument("--fixture", help="Use a catalog fixture as the input document")
        command.add_arguments(sub)
    return parser


def flag_overrides(args: argparse.Namespace) -> Dict[str, Any]:
    """Global flags as a nested config fragment for ``ConfigLoader.override``."""
    overrides: Dict[str, Any] = {}
    if args.log_level is not None:
        overrides.setdefault("logging", {})["level"] = args.log_level
    if args.log_format is not None:
        overrides.setdefault("logging", {})["format"] = args.log_format
    if args.indent is not None:
        overrides["output"] = {"indent": args.indent}
    return overrides


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point; returns the process exit code."""
    args = build_parser().parse_args(argv)

    try:
        config_loader = ConfigLoader(args.config)
    except (FileNotFoundError, ValueError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return 2

    config_loader.override(flag_overrides(args))
    try:
        configure_logging(
            config_loader.get("logging.level", "warning"),
            config_loader.get("logging.format", "console"),
        )
    except ValueError as e:
        print(f"Error: {e}", file=sys.stderr)
        return 2

    try:
        threads = resolve_threads(config_loader, args.threads)
    except DonaldsonError as e:
        sys.stdout.write(dumps({"error": e.to_dict()}))
        return e.exit_code

    options = {
        k: v
        for k, v in vars(args).items()
        if k not in ("command", "config", "threads", "log_level", "log_format", "indent", "input", "fixture")
    }
    orchestrator = Orchestrator(config_loader, threads=threads)
    result = orchestrator.execute(
        args.command,
        options,
        input_path=getattr(args, "input", None),
        fixture=getattr(args, "fixture", None),
    )

    indent = config_loader.get("output.indent", 2)
    payload = result.output if result.error is None else {"error": result.error}
    sys.stdout.write(dumps(payload, indent=indent or None))
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
