"""Helpers and synthetic data for testing"""

from .synthetic_data import *  # noqa: F403
