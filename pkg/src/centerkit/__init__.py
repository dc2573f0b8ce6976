"""Exact tools for centers, global centers and infinity analysis of planar polynomial systems."""

__version__ = "0.1.0"
