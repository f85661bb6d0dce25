"""Configuration loader for defaults and the fixture catalog."""
from pathlib import Path
from typing import Any, Dict, List, Optional

import yaml

DEFAULT_CONFIG = Path(__file__).parent.parent / "config" / "donaldson.yaml"


class ConfigLoader:
    """Loads and manages configuration from YAML files."""

    def __init__(self, config_path: Optional[Path] = None):
        """Initialize config loader.

        Args:
            config_path: Path to the main config file (defaults to config/donaldson.yaml)
        """
        self.config_path = Path(config_path) if config_path is not None else DEFAULT_CONFIG
        self.config: Dict[str, Any] = {}
        self.fixture_configs: Dict[str, Dict[str, Any]] = {}

        self._load_main_config()
        self._load_fixture_configs()

    def _load_main_config(self) -> None:
        if not self.config_path.exists():
            raise FileNotFoundError(f"Config file not found: {self.config_path}")

        with open(self.config_path, "r") as f:
            self.config = yaml.safe_load(f) or {}

    def _load_fixture_configs(self) -> None:
        """Load every fixture declaration under fixtures/, keyed by its name."""
        fixtures_dir = self.config_path.parent / "fixtures"
        if not fixtures_dir.exists():
            return

        for fixture_file in sorted(fixtures_dir.glob("*.yaml")):
            with open(fixture_file, "r") as f:
                declaration = yaml.safe_load(f) or {}
            name = declaration.get("name", fixture_file.stem.replace("_", "-"))
            if name in self.fixture_configs:
                raise ValueError(f"Fixture {name!r} declared twice ({fixture_file.name})")
            self.fixture_configs[name] = declaration

    def get(self, key: str, default: Any = None) -> Any:
        """Get a configuration value by dot-notation key.

        Args:
            key: Configuration key (e.g., "fit.bound")
            default: Default value if key not found

        Returns:
            Configuration value or default
        """
        value: Any = self.config
        for k in key.split("."):
            if isinstance(value, dict) and k in value:
                value = value[k]
            else:
                return default
        return value

    def override(self, overrides: Dict[str, Any]) -> None:
        """Merge overrides (e.g. from CLI flags) into the loaded config."""
        self.config = self._deep_merge(self.config, overrides)

    def _deep_merge(self, base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
        result = base.copy()
        for key, value in override.items():
            if key in result and isinstance(result[key], dict) and isinstance(value, dict):
                result[key] = self._deep_merge(result[key], value)
            else:
                result[key] = value
        return result

    def get_fixture_config(self, name: str) -> Dict[str, Any]:
        """Get a fixture declaration.

        Raises:
            KeyError: If no fixture of that name is declared
        """
        if name not in self.fixture_configs:
            raise KeyError(name)
        return self.fixture_configs[name]

    def list_fixtures(self) -> List[str]:
        return sorted(self.fixture_configs)
