"""Project configuration loader using dynaconf.

Layers, lowest first:
- ``config/settings.yaml``
- every ``config/schemas/*.settings.yaml`` (deep-merged)
- ``.env`` and ``ROBUST_TOPT_`` environment variables (``__`` nests keys)
- in-memory overrides from :func:`set_value`
"""

import logging
from pathlib import Path
from typing import Any

from dynaconf import Dynaconf, Validator

ENVVAR_PREFIX = "ROBUST_TOPT"
_MISSING = object()

logger = logging.getLogger(__name__)

VALIDATORS = [
    Validator("reachability.x_max", gt=0, default=100.0),
    Validator("reachability.bisection_tol", gt=0, default=1e-8),
    Validator("control.os_gain", gt=0, default=1.0),
    Validator("sim.dt_control", gt=0, default=0.001),
    Validator("sim.rtol", gt=0, default=1e-8),
    Validator("sim.atol", gt=0, default=1e-10),
    Validator("sim.divergence_threshold", gt=0, default=10.0),
    Validator("sim.terminal_tol", gt=0, default=1e-3),
    Validator("sim.max_time", gt=0, default=10.0),
    Validator("experiment.max_workers", gte=1, default=3),
]

_settings: Dynaconf | None = None


def get_config_base() -> Path:
    """Directory holding settings.yaml and the schemas/ overlays.

    The source checkout wins over ``./config`` in the working directory.
    """
    checkout = Path(__file__).resolve().parents[3] / "config"
    if checkout.is_dir():
        return checkout
    local = Path.cwd() / "config"
    return local if local.is_dir() else checkout


def get_config_files() -> list[str]:
    """Configuration files in load order."""
    base = get_config_base()
    overlays = sorted((base / "schemas").rglob("*.settings.yaml")) if base.is_dir() else []
    return [str(base / "settings.yaml"), *(str(p) for p in overlays)]


def _load() -> Dynaconf:
    global _settings
    _settings = Dynaconf(
        envvar_prefix=ENVVAR_PREFIX,
        settings_files=get_config_files(),
        environments=False,
        load_dotenv=True,
        merge_enabled=True,
        lowercase_read=True,
        validators=VALIDATORS,
    )
    # a broken logging section must not block loading
    try:
        from robust_topt.config.logging import setup_logging

        setup_logging(_settings)
    except Exception:
        logger.warning("Logging configuration rejected; keeping defaults", exc_info=True)
    return _settings


def get_conf() -> Dynaconf:
    """Global configuration, loaded on first use.

    Example:
        >>> from robust_topt.config import get_conf
        >>> get_conf().sim.dt_control
        0.001
    """
    return _settings if _settings is not None else _load()


def reload_conf() -> Dynaconf:
    """Reread files and environment, dropping runtime overrides."""
    return _load()


def get_value(key: str, default: Any = None) -> Any:
    """Value at a dotted key such as ``"sim.dt_control"``, or ``default``."""
    value = get_conf().get(key, _MISSING)
    return default if value is _MISSING else value


def set_value(key: str, value: Any) -> None:
    """Override a dotted key in memory; nothing is written to disk."""
    get_conf().set(key, value)


def list_settings(prefix: str = "") -> dict[str, Any]:
    """Settings below ``prefix`` as a plain dict (everything when empty).

    A prefix naming a scalar returns ``{prefix: value}``; an unknown prefix
    returns ``{}``.
    """
    conf = get_conf()
    if not prefix:
        return dict(conf.as_dict())

    value = conf.get(prefix, _MISSING)
    if value is _MISSING:
        return {}
    if hasattr(value, "to_dict"):
        return dict(value.to_dict())
    if isinstance(value, dict):
        return value
    return {prefix: value}


__all__ = [
    "get_conf",
    "reload_conf",
    "get_value",
    "set_value",
    "list_settings",
    "get_config_base",
    "get_config_files",
]
