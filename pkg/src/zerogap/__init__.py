"""Exact evaluation and optimisation of zero-gap functionals for quadratic fields."""

__version__ = "0.1.0"
