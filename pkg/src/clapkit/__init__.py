"""Continual learning and planning with lifted probabilistic action models."""

__version__ = "0.1.0"
