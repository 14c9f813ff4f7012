"""Volterra LDP - grandes desvios e assintóticas de smile em volatilidade fracionária."""

__version__ = "1.0.0"
