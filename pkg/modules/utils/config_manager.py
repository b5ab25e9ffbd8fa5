"""
Configuration manager module for RMTT-Workbench.
Handles loading, merging, and saving configuration.
"""

import os
import json
import logging
from typing import Dict, Any, Optional

logger = logging.getLogger(__name__)

DEFAULT_LOCATIONS = ['config.json', os.path.join('data', 'config.json')]


class ConfigManager:
    """
    Manages configuration loading, merging and saving.
    """

    def __init__(self, config_path: Optional[str] = None):
        """
        Initialize the configuration manager.

        Args:
            config_path: Path to a JSON configuration file

        Raises:
            FileNotFoundError: If an explicitly given path does not exist
        """
        self.config = self._load_default_config()
        self.config_path = None

        if config_path and not os.path.exists(config_path):
            raise FileNotFoundError(f"Config file not found: {config_path}")

        # If no config path provided, look in default locations
        if not config_path:
            for path in DEFAULT_LOCATIONS:
                if os.path.exists(path):
                    config_path = path
                    break

        if config_path:
            self.config_path = config_path
            self._load_config(config_path)

    def _load_default_config(self) -> Dict[str, Any]:
        """
        Load default configuration.

        Returns:
            dict: Default configuration
        """
        return {
            'app_name': 'RMTT-Workbench',
            'app_version': '1.0.0',
            'templates_dir': os.path.join('data', 'templates'),
            'logging': {
                'level': 'INFO',
                'file': None
            },
            'parser': {
                'strict': True
            },
            'query': {
                'tolerant': True,
                'mode': 'pruned',
                'distinct': False
            },
            'generator': {
                'seed': 42,
                'universities': 2,
                'departments_per_university': 10,
                'students_per_department': 400,
                'professors_per_department': 12,
                'courses_per_department': 20,
                'research_groups_per_department': 5,
                'publications_per_professor': 2,
                'graduate_every': 4
            },
            'bench': {
                'engines': ['single', 'vp', 'rmtt-sound', 'rmtt-pruned'],
                'repetitions': 3,
                'progress': True
            }
        }

    def _load_config(self, config_path: str):
        """
        Load configuration from a JSON file.

        Args:
            config_path: Path to the configuration file

        Raises:
            ValueError: If the file is not a JSON object
        """
        try:
            with open(config_path, 'r', encoding='utf-8') as f:
                loaded_config = json.load(f)
        except json.JSONDecodeError as e:
            raise ValueError(f"Invalid JSON in config file {config_path}: {e}") from e

        if not isinstance(loaded_config, dict):
            raise ValueError(f"Config file {config_path} must contain a JSON object")

        self._deep_update(self.config, loaded_config)
        logger.info(f"Loaded configuration from {config_path}")

    def _deep_update(self, d: Dict, u: Dict) -> Dict:
        """
        Recursively update a dictionary with another dictionary.

        Args:
            d: Base dictionary to update
            u: Dictionary with updates

        Returns:
            dict: Updated dictionary
        """
        for k, v in u.items():
            if isinstance(v, dict) and k in d and isinstance(d[k], dict):
                self._deep_update(d[k], v)
            else:
                d[k] = v
        return d

    def get_config(self) -> Dict[str, Any]:
        """
        Get the complete configuration.

        Returns:
            dict: Complete configuration
        """
        return self.config

    def get(self, key: str, default: Any = None) -> Any:
        """
        Get a configuration value by key.

        Args:
            key: Configuration key, dot notation for nested values
            default: Default value if key not found

        Returns:
            Any: Configuration value
        """
        value = self.config
        for part in key.split('.'):
            if isinstance(value, dict) and part in value:
                value = value[part]
            else:
                return default
        return value

    def set(self, key: str, value: Any):
        """
        Set a configuration value.

        Args:
            key: Configuration key, dot notation for nested values
            value: Configuration value
        """
        parts = key.split('.')
        config = self.config
        for part in parts[:-1]:
            if not isinstance(config.get(part), dict):
                config[part] = {}
            config = config[part]
        config[parts[-1]] = value

    def save(self, path: Optional[str] = None) -> bool:
        """
        Save configuration to a JSON file.

        Args:
            path: Path to save to (defaults to original path)

        Returns:
            bool: Success status
        """
        save_path = path or self.config_path or os.path.join('data', 'config.json')

        try:
            os.makedirs(os.path.dirname(os.path.abspath(save_path)), exist_ok=True)
            with open(save_path, 'w', encoding='utf-8') as f:
                json.dump(self.config, f, indent=4)
            logger.info(f"Saved configuration to {save_path}")
            return True
        except OSError as e:
            logger.error(f"Error saving configuration to {save_path}: {e}")
            return False
