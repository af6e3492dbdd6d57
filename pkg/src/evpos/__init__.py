"""Numerical laboratory for eventual positivity of linear evolution equations."""

__version__ = "1.0.0"
