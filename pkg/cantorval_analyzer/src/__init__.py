"""Exact interval algebra, subsum covers, the X(m) similarity system and its boundary."""

__version__ = "0.1.0"
