"""Projected Robbins-Monro estimation of a shift parameter with a recursive
kernel estimate of the design density."""

__version__ = "0.1.0"
