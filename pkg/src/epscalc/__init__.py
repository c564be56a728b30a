"""Epsilon calculus for first-order arithmetic: translation, evaluation,
derivation checking, the epsilon substitution method, and ordinal weights."""

__version__ = "0.1.0"
