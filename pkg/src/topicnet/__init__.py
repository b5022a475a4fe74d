"""Topic co-occurrence networks from MeSH-indexed publication corpora."""

__version__ = "0.1.0"
