"""
Configuration Module
Run configuration parsing and ambient settings
"""

from .run_config import (
    CONFIG_KEYS,
    REQUIRED_KEYS,
    ConfigError,
    RunConfig,
    build_config,
    emit_config,
    load_config,
    parse_config,
    read_config_entries,
)
from .settings import Settings, load_settings

__all__ = [
    'CONFIG_KEYS', 'REQUIRED_KEYS', 'ConfigError', 'RunConfig', 'build_config', 'emit_config',
    'load_config', 'parse_config', 'read_config_entries', 'Settings', 'load_settings',
]
