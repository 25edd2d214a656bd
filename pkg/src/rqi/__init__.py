"""Numerical tools for relativistic quantum information with localized probes."""

__version__ = "0.1.0"
