"""Exact computations with affine (annular) diagram monoids."""

__version__ = "0.1.0"
