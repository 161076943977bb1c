"""Randomized social choice under quantile agent utilities."""
