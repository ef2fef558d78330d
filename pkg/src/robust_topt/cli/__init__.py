"""Command-line interface for robust-topt."""

from robust_topt.cli.__main__ import app, main

__all__ = ["app", "main"]
