"""Bayesian sequential testing of the relative risk in two-arm binomial trials."""
__version__ = "0.1.0"
