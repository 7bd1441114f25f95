"""Suicidal-ideation screening for social-media text."""

__version__ = "0.1.0"
