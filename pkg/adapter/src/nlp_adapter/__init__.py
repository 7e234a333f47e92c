"""Standoff NLP layer production for raw-text corpora."""

__version__ = "0.1.0"
