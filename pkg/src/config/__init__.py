"""Configuration management modules."""

from src.config.run_config import RunConfig, load_config, read_config_file

__all__ = ["RunConfig", "load_config", "read_config_file"]
