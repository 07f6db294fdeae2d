"""Numerical laboratory for Chebyshev and Pompeiu-Chebyshev type inequalities."""
__version__ = "0.1.0"
