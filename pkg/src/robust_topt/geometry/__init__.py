"""Geometric path representation."""

from robust_topt.geometry.path import (
    PathSpline,
    build_spline,
    eval_path,
    load_path,
    spline_from_config,
)

__all__ = ["PathSpline", "build_spline", "eval_path", "load_path", "spline_from_config"]
