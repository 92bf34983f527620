"""Merge brownfield plant relations into a tiered property graph, mine
repeated structure, and compress it into templates."""

__version__ = "0.1.0"
