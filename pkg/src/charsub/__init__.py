"""Weighted modulus densities and f^g-statistically characterized subgroups of the circle."""

__version__ = "0.1.0"
