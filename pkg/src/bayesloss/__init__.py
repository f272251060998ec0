"""Bayesian decision analysis for binary-outcome policy effects."""

__version__ = "0.1.0"
