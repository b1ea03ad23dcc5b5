"""Exact Frobenius-charpoly data for compatible systems of Galois representations."""

__version__ = "0.1.0"
