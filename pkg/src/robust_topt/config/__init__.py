"""Configuration management."""

from robust_topt.config.logging import (
    get_logger,
    reconfigure_logging,
    set_module_log_level,
    setup_logging,
)
from robust_topt.config.project import (
    get_conf,
    get_config_base,
    get_config_files,
    get_value,
    list_settings,
    reload_conf,
    set_value,
)
from robust_topt.config.settings import ToptSettings, settings_from_conf

__all__ = [
    "ToptSettings",
    "settings_from_conf",
    "get_conf",
    "get_config_base",
    "get_config_files",
    "get_value",
    "list_settings",
    "set_value",
    "reload_conf",
    # Logging exports
    "setup_logging",
    "get_logger",
    "reconfigure_logging",
    "set_module_log_level",
]
