"""Kato fans, skeletons, weight functions and their topology, in exact arithmetic."""

__version__ = "0.1.0"
