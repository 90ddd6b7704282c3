"""Exact computation of log syntomic cohomology of truncated polynomial rings."""

__version__ = "0.1.0"
