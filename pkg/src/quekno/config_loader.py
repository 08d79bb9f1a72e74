"""
Configuration loader for the QUEKNO benchmark toolkit.
"""
import copy
import os
from pathlib import Path
from typing import Any, Dict, Optional

import yaml

CONFIG_ENV_VAR = "QUEKNO_CONFIG"

DEFAULTS: Dict[str, Any] = {
    'project': {'name': 'quekno'},
    'logging': {
        'level': 'INFO',
        'format': '%(asctime)s %(levelname)s %(name)s: %(message)s',
    },
    'graph': {
        'embedding_node_limit': 10_000_000,
        'edge_jitter': 2,
        'graph_sizes': {'small': 8, 'large': 16, 'tokyo-default': 5},
    },
    'perm': {'glink_retry_budget': 200},
    'circuit': {'one_qubit_tags': ['x', 'h', 't', 's']},
    'generation': {
        'gate_costs': [0, 1, 2, 3, 4, 5, 10, 15, 20, 25],
        'depth_costs': [1, 2, 3, 4, 5, 10],
        'count_per_cell': 10,
        'default_seed': 42,
    },
    'router': {
        'lookahead_window': 20,
        'lookahead_discount': 0.5,
        'restarts': 5,
    },
    'paths': {'output_dir': 'data/output'},
    'cli': {'workers': 1},
}


def _deep_merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    merged = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


class Config:
    """Configuration manager for benchmark generation and evaluation."""

    def __init__(self, config_path: Optional[str] = None):
        """
        Initialize configuration from a YAML file layered over DEFAULTS.

        Args:
            config_path: Path to a config.yml file. If None, the file named by
                QUEKNO_CONFIG is used, else config/config.yml under the project
                root; a missing default file falls back to DEFAULTS.
        """
        # __file__ is src/quekno/config_loader.py
        self._project_root = Path(__file__).resolve().parent.parent.parent
        explicit = config_path is not None or os.environ.get(CONFIG_ENV_VAR)
        if config_path is None:
            config_path = os.environ.get(CONFIG_ENV_VAR) or (
                self._project_root / "config" / "config.yml"
            )

        self.config_path = Path(config_path)
        self._config = self._load_config(required=bool(explicit))

    def _load_config(self, required: bool) -> Dict[str, Any]:
        """Load configuration from YAML and merge it over the defaults."""
        if not self.config_path.exists():
            if required:
                raise FileNotFoundError(f"Config file not found: {self.config_path}")
            return copy.deepcopy(DEFAULTS)

        with open(self.config_path, 'r') as f:
            loaded = yaml.safe_load(f) or {}
        if not isinstance(loaded, dict):
            raise ValueError(f"Config file must hold a mapping: {self.config_path}")

        return _deep_merge(DEFAULTS, loaded)

    def get(self, key: str, default: Any = None) -> Any:
        """
        Get configuration value by key (supports dot notation).

        Args:
            key: Configuration key (e.g., 'router.lookahead_window')
            default: Default value if key not found

        Returns:
            Configuration value
        """
        value: Any = self._config
        for k in key.split('.'):
            if isinstance(value, dict) and k in value:
                value = value[k]
            else:
                return default
        return value

    def get_path(self, key: str, create_if_missing: bool = False) -> Path:
        """
        Get path from configuration and resolve relative to project root.

        Args:
            key: Configuration key for path
            create_if_missing: Create directory if it doesn't exist

        Returns:
            Absolute path
        """
        path_str = self.get(key)
        if path_str is None:
            raise ValueError(f"Path not found in config: {key}")

        path = Path(path_str)
        if not path.is_absolute():
            path = self._project_root / path

        if create_if_missing and not path.exists():
            path.mkdir(parents=True, exist_ok=True)

        return path

    @property
    def graph(self) -> Dict[str, Any]:
        """Get graph and embedding-search configuration."""
        return self._config.get('graph', {})

    @property
    def generation(self) -> Dict[str, Any]:
        """Get benchmark generation configuration."""
        return self._config.get('generation', {})

    @property
    def router(self) -> Dict[str, Any]:
        """Get baseline router configuration."""
        return self._config.get('router', {})

    @property
    def logging_settings(self) -> Dict[str, Any]:
        return self._config.get('logging', {})

    @property
    def paths(self) -> Dict[str, str]:
        """Get all paths configuration."""
        return self._config.get('paths', {})

    @property
    def output_dir(self) -> Path:
        """Get default suite output directory."""
        return self.get_path('paths.output_dir')

    @property
    def graph_sizes(self) -> Dict[str, int]:
        """Get target edge counts per named graph size."""
        return dict(self.get('graph.graph_sizes', {}))

    @property
    def generation_params(self) -> Dict[str, Any]:
        """Get keyword arguments for GenerationOptions."""
        return {
            'retry_budget': self.get('perm.glink_retry_budget', 200),
            'node_limit': self.get('graph.embedding_node_limit', 10_000_000),
            'edge_jitter': self.get('graph.edge_jitter', 2),
            'one_qubit_tags': tuple(self.get('circuit.one_qubit_tags', ['x', 'h', 't', 's'])),
        }

    @property
    def router_params(self) -> Dict[str, Any]:
        """Get keyword arguments for RouterConfig."""
        return {
            'lookahead_window': self.get('router.lookahead_window', 20),
            'lookahead_discount': self.get('router.lookahead_discount', 0.5),
            'restarts': self.get('router.restarts', 5),
        }

    def __repr__(self) -> str:
        """String representation."""
        return f"Config(config_path='{self.config_path}')"


# Global config instance
_config_instance: Optional[Config] = None


def get_config(config_path: Optional[str] = None) -> Config:
    """
    Get or create global configuration instance.

    Args:
        config_path: Path to config file. If None, uses default.

    Returns:
        Config instance
    """
    global _config_instance

    if _config_instance is None or config_path is not None:
        _config_instance = Config(config_path)

    return _config_instance


def reload_config(config_path: Optional[str] = None) -> Config:
    """
    Force reload of configuration.

    Args:
        config_path: Path to config file. If None, uses default.

    Returns:
        New Config instance
    """
    global _config_instance
    _config_instance = Config(config_path)
    return _config_instance
