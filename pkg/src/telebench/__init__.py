"""Telecom corpus curation and benchmark toolchain."""

__version__ = "0.1.0"
