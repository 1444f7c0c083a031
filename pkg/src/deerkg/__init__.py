"""Descriptive knowledge graph toolkit.

Builds a graph whose edges carry scored natural-language sentences
describing entity relationships, and serves interactive queries over it.
"""

__version__ = "0.1.0"
