"""Exact computations for graded sections of negatively weighted Lie algebra extensions."""

__version__ = "0.1.0"
