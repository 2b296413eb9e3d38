"""Exact and numerical experiments on anti-concentration of inner products over the sign cube."""

__version__ = "0.1.0"
