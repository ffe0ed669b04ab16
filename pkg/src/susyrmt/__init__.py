"""Supermathematics kernel and random-matrix Monte Carlo oracle."""

__version__ = "0.1.0"
