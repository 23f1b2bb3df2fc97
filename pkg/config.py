"""Configuration management for the class-module toolkit."""

import os
import yaml
import logging
from typing import Dict, Any

from exceptions import ConfigError

logger = logging.getLogger(__name__)


class Config:
    """Configuration manager: YAML file merged over the defaults, then environment overrides."""

    DEFAULT_CONFIG = {
        "max_field_order": 65536,
        "max_window_dim": 4096,
        "max_matrix_dim": 400,
        "max_exp_terms": 48,
        "time_budget_secs": None,
        "nmax": 2,
        "prime_degree_bound": 3,
        "unit_degree_bound": 1,
        "unit_horizon": None,
        "parallel_layers": False,
        "parallel_sweep": False,
        "max_workers": 3,
        "affine_window_min": 4,
        "output_format": "json",
        "log_file": "taelman.log",
        "log_level": "INFO",
        "seed": 7,
        "selftest_samples": 200,
        "report_timings": False,
    }

    OUTPUT_FORMATS = ("json", "csv", "table")
    POSITIVE_KEYS = ("max_field_order", "max_window_dim", "max_matrix_dim", "max_exp_terms",
                     "max_workers", "affine_window_min", "unit_degree_bound")
    NONNEGATIVE_KEYS = ("nmax", "prime_degree_bound", "selftest_samples")

    def __init__(self, config_file: str = None):
        self.config_file = config_file or os.environ.get("TAELMAN_CONFIG", "config.yaml")
        self.config = self.load_config()
        self.apply_environment()

    def load_config(self) -> Dict[str, Any]:
        """Load configuration from YAML file or create default."""
        config = self.DEFAULT_CONFIG.copy()
        try:
            with open(self.config_file, "r", encoding="utf-8") as f:
                loaded = yaml.safe_load(f) or {}
        except FileNotFoundError:
            logger.warning(f"{self.config_file} not found, using default configuration")
            self.create_default_config()
            return config
        except yaml.YAMLError as e:
            raise ConfigError(f"{self.config_file} is not valid YAML: {e}") from e
        if not isinstance(loaded, dict):
            raise ConfigError(f"{self.config_file} must hold a mapping, got {type(loaded).__name__}")
        unknown = sorted(set(loaded) - set(config))
        if unknown:
            logger.warning(f"Ignoring unknown configuration keys: {unknown}")
        config.update({k: v for k, v in loaded.items() if k in config})
        logger.info(f"Loaded configuration from {self.config_file}")
        return config

    def create_default_config(self):
        """Create a default configuration file."""
        try:
            with open(self.config_file, "w", encoding="utf-8") as f:
                yaml.safe_dump(self.DEFAULT_CONFIG, f, default_flow_style=False, sort_keys=False)
            logger.info(f"Created sample {self.config_file} file")
        except OSError as e:
            logger.warning(f"Could not write {self.config_file}: {e}")

    def apply_environment(self):
        budget = os.environ.get("RESOURCE_BUDGET_SECS")
        if budget:
            try:
                self.config["time_budget_secs"] = int(budget)
            except ValueError as e:
                raise ConfigError(f"RESOURCE_BUDGET_SECS must be an integer, got {budget!r}") from e

    def get(self, key: str, default=None):
        """Get configuration value."""
        return self.config.get(key, default)

    def __getitem__(self, key: str):
        """Allow dictionary-style access."""
        return self.config[key]

    def validate_limits(self) -> bool:
        for key in self.POSITIVE_KEYS:
            value = self.config[key]
            if not isinstance(value, int) or isinstance(value, bool) or value < 1:
                raise ConfigError(f"{key} must be a positive integer, got {value!r}")
        for key in self.NONNEGATIVE_KEYS:
            value = self.config[key]
            if not isinstance(value, int) or isinstance(value, bool) or value < 0:
                raise ConfigError(f"{key} must be a nonnegative integer, got {value!r}")
        for key in ("time_budget_secs", "unit_horizon"):
            value = self.config[key]
            if value is not None and (not isinstance(value, int) or isinstance(value, bool) or value < 1):
                raise ConfigError(f"{key} must be null or a positive integer, got {value!r}")
        return True

    def validate_output_format(self) -> bool:
        if self.config["output_format"] not in self.OUTPUT_FORMATS:
            raise ConfigError(
                f"output_format must be one of {list(self.OUTPUT_FORMATS)}, got {self.config['output_format']!r}"
            )
        return True

    def validate(self) -> bool:
        return self.validate_limits() and self.validate_output_format()
