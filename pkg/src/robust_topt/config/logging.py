"""Logging configuration integrated with Dynaconf.

Provides:
- building logging.dictConfig from a dynaconf ``logging`` section
- setup_logging(conf) to apply configuration
- reconfigure_logging() to reload from the current dynaconf config
- set_module_log_level(module, level) to change levels at runtime
- get_logger(name=None) helper
"""

from __future__ import annotations

import inspect
import logging
import logging.config
from contextlib import suppress
from importlib.util import find_spec
from pathlib import Path
from typing import Any

from dynaconf import Dynaconf

from robust_topt.config.project import get_conf, set_value

PACKAGE_LOGGER = "robust_topt"
THIRD_PARTY_LOGGERS = ("numpy", "scipy", "matplotlib", "urllib3")

# snake_case keys (env-var friendly) -> dotted module paths
KNOWN_MODULES: dict[str, str] = {
    "config_project": "robust_topt.config.project",
    "config_logging": "robust_topt.config.logging",
    "geometry_path": "robust_topt.geometry.path",
    "dynamics_models": "robust_topt.dynamics.models",
    "dynamics_coefficients": "robust_topt.dynamics.coefficients",
    "reachability_constraints": "robust_topt.reachability.constraints",
    "reachability_sets": "robust_topt.reachability.sets",
    "reachability_profile": "robust_topt.reachability.profile",
    "control_path_controllers": "robust_topt.control.path_controllers",
    "control_tracking": "robust_topt.control.tracking",
    "sim_simulator": "robust_topt.sim.simulator",
    "service_experiment": "robust_topt.service.experiment",
}


def _ensure_log_dir(path: str | Path) -> None:
    with suppress(OSError):
        Path(path).parent.mkdir(parents=True, exist_ok=True)


def _build_formatters(cfg: dict[str, Any]) -> dict[str, Any]:
    fmt = cfg.get("format") or "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
    formatters: dict[str, Any] = {"default": {"format": fmt, "datefmt": "%Y-%m-%d %H:%M:%S"}}

    handlers_cfg = cfg.get("handlers", {}) or {}
    colorize = handlers_cfg.get("console", {}).get("colorize", True)
    if colorize and find_spec("colorlog") is not None:
        formatters["colored"] = {
            "()": "colorlog.ColoredFormatter",
            "format": "%(log_color)s" + fmt,
            "datefmt": "%Y-%m-%d %H:%M:%S",
            "log_colors": {
                "DEBUG": "cyan",
                "INFO": "green",
                "WARNING": "yellow",
                "ERROR": "red",
                "CRITICAL": "red,bg_white",
            },
        }

    json_requested = cfg.get("json", False) or handlers_cfg.get("file", {}).get(
        "json_format", False
    )
    if json_requested and find_spec("pythonjsonlogger") is not None:
        formatters["json"] = {
            "()": "pythonjsonlogger.jsonlogger.JsonFormatter",
            "format": "%(asctime)s %(name)s %(levelname)s %(funcName)s %(message)s",
        }

    return formatters


def _build_handlers(
    cfg: dict[str, Any], formatters: dict[str, Any]
) -> tuple[dict[str, Any], list[str]]:
    handlers: dict[str, Any] = {}
    handler_names: list[str] = []
    handlers_cfg = cfg.get("handlers", {}) or {}

    console_cfg = handlers_cfg.get("console", {}) or {}
    if console_cfg.get("enabled", True):
        handlers["console"] = {
            "class": "logging.StreamHandler",
            "level": console_cfg.get("level", "INFO"),
            "formatter": "colored" if "colored" in formatters else "default",
            # stderr keeps CSV/JSON written to stdout clean
            "stream": "ext://sys.stderr",
        }
        handler_names.append("console")

    file_cfg = handlers_cfg.get("file", {}) or {}
    if file_cfg.get("enabled", False):
        path = file_cfg.get("path", "logs/robust_topt.log")
        _ensure_log_dir(path)
        use_json = "json" in formatters and file_cfg.get("json_format", cfg.get("json", False))
        handlers["file"] = {
            "class": "logging.handlers.RotatingFileHandler",
            "level": file_cfg.get("level", "DEBUG"),
            "formatter": "json" if use_json else "default",
            "filename": str(path),
            "maxBytes": file_cfg.get("max_bytes", 10_485_760),
            "backupCount": file_cfg.get("backup_count", 5),
            "encoding": "utf-8",
        }
        handler_names.append("file")

    return handlers, handler_names


def resolve_logger_name(raw: str) -> str:
    """Resolve an env/config logger key to a dotted logger name.

    Accepted forms:
    - dot notation: ``robust_topt.sim.simulator``
    - triple underscore boundaries: ``robust_topt___sim___simulator``
    - registry shorthand: ``sim_simulator`` -> ``robust_topt.sim.simulator``
    """
    if "." in raw:
        return raw
    if "___" in raw:
        return raw.replace("___", ".")
    key = raw.removeprefix(f"{PACKAGE_LOGGER}_")
    if key in KNOWN_MODULES:
        return KNOWN_MODULES[key]
    if raw == PACKAGE_LOGGER:
        return raw
    return raw.replace("_", ".")


def _build_loggers(cfg: dict[str, Any], handler_names: list[str]) -> dict[str, Any]:
    base_level = cfg.get("level", "INFO")
    loggers: dict[str, Any] = {
        PACKAGE_LOGGER: {"level": base_level, "handlers": handler_names, "propagate": False}
    }

    for name, val in (cfg.get("loggers", {}) or {}).items():
        actual = resolve_logger_name(name)
        if isinstance(val, dict):
            level = str(val.get("level", base_level)).upper()
            propagate = bool(val.get("propagate", False))
            handlers = val.get("handlers", handler_names)
        else:
            # shorthand: string => level
            level = str(val).upper()
            propagate = False
            handlers = handler_names
        # children of the package logger propagate to it instead of double-logging
        if actual != PACKAGE_LOGGER and actual.startswith(f"{PACKAGE_LOGGER}.") and propagate:
            handlers = []
        loggers[actual] = {"level": level, "handlers": handlers, "propagate": propagate}

    lib_level = cfg.get("library_level", "WARNING")
    for lib in THIRD_PARTY_LOGGERS:
        loggers.setdefault(lib, {"level": lib_level, "handlers": handler_names, "propagate": False})

    return loggers


def _build_dict_config(cfg: dict[str, Any]) -> dict[str, Any]:
    formatters = _build_formatters(cfg)
    handlers, handler_names = _build_handlers(cfg, formatters)
    return {
        "version": 1,
        "disable_existing_loggers": False,
        "formatters": formatters,
        "handlers": handlers,
        "loggers": _build_loggers(cfg, handler_names),
        "root": {"level": cfg.get("library_level", "WARNING"), "handlers": handler_names},
    }


def _logging_section(conf: Any) -> dict[str, Any]:
    if conf is None:
        return {}
    if isinstance(conf, (Dynaconf, dict)):
        section = conf.get("logging", {}) or {}
    else:
        try:
            section = conf.as_dict().get("logging", {}) or {}
        except Exception:
            return {}
    # dynaconf Box -> plain dict so dictConfig never sees Box types
    return section.to_dict() if hasattr(section, "to_dict") else dict(section)


def setup_logging(dynaconf_conf: Dynaconf | dict[str, Any] | None = None) -> None:
    """Configure logging from a dynaconf configuration object or plain dict.

    Accepts either a Dynaconf instance or a dict with a ``logging`` key. When
    ``dynaconf_conf`` is None the global project configuration is used.
    """
    try:
        if dynaconf_conf is None:
            try:
                dynaconf_conf = get_conf()
            except Exception:
                dynaconf_conf = None
        dict_config = _build_dict_config(_logging_section(dynaconf_conf))
        logging.config.dictConfig(dict_config)
        logging.getLogger(PACKAGE_LOGGER).debug(
            "Logging configured",
            extra={"configured_handlers": list(dict_config["handlers"].keys())},
        )
    except Exception:
        logging.basicConfig(level=logging.INFO)
        logging.getLogger(PACKAGE_LOGGER).warning(
            "Failed to apply logging config; using basicConfig"
        )


def reconfigure_logging() -> None:
    """Reload logging configuration from the active dynaconf configuration."""
    try:
        cfg = get_conf()
    except Exception:
        cfg = None
    setup_logging(cfg)


def set_module_log_level(module: str, level: str) -> None:
    """Set the logging level for a module at runtime and persist it to Dynaconf.

    Args:
        module: Module name, dot or underscore notation accepted.
        level: Level name (DEBUG, INFO, WARNING, ERROR, CRITICAL)
    """
    level_name = str(level).upper()
    if level_name not in {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}:
        raise ValueError(f"Invalid log level: {level}")

    name = resolve_logger_name(module)
    logging.getLogger(name).setLevel(level_name)

    # persisted with underscores so the key survives env-var style lookups
    with suppress(Exception):
        set_value(f"logging.loggers.{name.replace('.', '___')}.level", level_name)


def get_logger(name: str | None = None) -> logging.Logger:
    """Get a logger; infers the caller's module name when ``name`` is None."""
    if name:
        return logging.getLogger(name)

    frame = inspect.currentframe()
    caller = frame.f_back if frame is not None else None
    module_name = caller.f_globals.get("__name__", "") if caller is not None else ""
    return logging.getLogger(module_name or PACKAGE_LOGGER)


__all__ = [
    "setup_logging",
    "reconfigure_logging",
    "set_module_log_level",
    "get_logger",
    "resolve_logger_name",
]
