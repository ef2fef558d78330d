"""Typed runtime settings with Pydantic Settings."""

from __future__ import annotations

from typing import Any

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class ToptSettings(BaseSettings):
    """Numerical defaults for set computation, control and simulation.

    Configuration is loaded from:
    - Environment variables (ROBUST_TOPT_ prefix)
    - .env file
    - Direct constructor arguments (see :func:`settings_from_conf`)
    """

    model_config = SettingsConfigDict(
        env_prefix="ROBUST_TOPT_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    # Reachability; grid size, radius and bandwidth come from the scenario
    x_max: float = Field(
        default=100.0, gt=0.0, description="Squared path velocity ceiling for bisection brackets"
    )
    bisection_tol: float = Field(
        default=1e-8, gt=0.0, description="Endpoint tolerance of the one-step set bisection"
    )

    # Control
    os_gain: float = Field(
        default=1.0, gt=0.0, description="Proportional gain of the online-scaling baseline"
    )

    # Simulation
    dt_control: float = Field(default=0.001, gt=0.0, description="Control sample time (s)")
    rtol: float = Field(default=1e-8, gt=0.0, description="Integrator relative tolerance")
    atol: float = Field(default=1e-10, gt=0.0, description="Integrator absolute tolerance")
    divergence_threshold: float = Field(
        default=10.0, gt=0.0, description="Abort when the tracking error norm exceeds this"
    )
    terminal_tol: float = Field(
        default=1e-3, gt=0.0, description="Terminal tolerance on the path velocity"
    )
    max_time: float = Field(default=10.0, gt=0.0, description="Simulated time limit (s)")

    # Experiments
    max_workers: int = Field(default=3, ge=1, description="Concurrent controller runs")


_SECTIONS: dict[str, tuple[str, ...]] = {
    "reachability": ("x_max", "bisection_tol"),
    "control": ("os_gain",),
    "sim": (
        "dt_control",
        "rtol",
        "atol",
        "divergence_threshold",
        "terminal_tol",
        "max_time",
    ),
    "experiment": ("max_workers",),
}


def settings_from_conf(conf: Any = None) -> ToptSettings:
    """Build :class:`ToptSettings` from the sectioned dynaconf configuration.

    Args:
        conf: Dynaconf instance (defaults to the global project configuration)

    Returns:
        Validated settings
    """
    if conf is None:
        from robust_topt.config.project import get_conf

        conf = get_conf()

    kwargs: dict[str, Any] = {}
    for section, keys in _SECTIONS.items():
        for key in keys:
            value = conf.get(f"{section}.{key}", None)
            if value is not None:
                kwargs[key] = value
    return ToptSettings(**kwargs)


__all__ = ["ToptSettings", "settings_from_conf"]
