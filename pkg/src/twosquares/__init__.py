"""Sums of two squares modulo n, and density bounds for two squares plus powers of 2."""

__version__ = "0.1.0"
