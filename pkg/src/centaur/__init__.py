"""Mixture-of-experts chess teams: two frozen engines, one manager."""

__version__ = "0.1.0"
