"""Point-cloud classifier explanations."""

__version__ = "0.3.0"
